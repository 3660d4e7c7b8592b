//! Recursive-descent parser for `.fscript` sources.
//!
//! ```text
//! file     := ( comment | '@default' ident | context )*
//! context  := ident '::' [ 'trigger{' pattern '}' ] rule+ ';;'
//! rule     := pattern '==>' '[' body ( '|' body )* ']'
//! pattern  := ( '*' | '{' pattern ( '|' pattern )+ '}' | word )+
//! body     := ( text | '^' digits | '#goto(' ident [ ',' ( '^' digits | '<<' synth '>>' ) ] ')' )+
//! ```
//!
//! Syntax errors abandon the current context and resume after the next `;;`.

use super::ast::*;
use super::diagnostic::{Diagnostic, DiagnosticCode as Code};
use crate::matcher::tokenize::{normalize, split_word};

/// Alternations may nest one level inside an alternation branch, no deeper.
pub const MAX_ALTERNATION_DEPTH: usize = 2;

/// Parse script text into a [`ScriptSet`]. On failure every diagnostic
/// collected across all contexts is returned.
pub fn parse_script_set(source_text: &str, source_name: &str) -> Result<ScriptSet, Vec<Diagnostic>> {
    let src = normalize(source_text);
    let mut p = Parser::new(&src);
    p.parse_file();
    if p.contexts.is_empty() && p.diags.is_empty() {
        let span = p.span_from(0);
        p.diags.push(Diagnostic::error(Code::EmptyScript, span, "script contains no contexts"));
    }
    if !p.diags.is_empty() {
        return Err(p.diags);
    }
    let default_context = p.default_context.unwrap_or_else(|| p.contexts[0].name.clone());
    Ok(ScriptSet { contexts: p.contexts, default_context, source_name: source_name.to_string() })
}

/// Marker for "a diagnostic has been recorded; unwind to the context level".
struct Abort;

type PResult<T> = Result<T, Abort>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum PatternEnd {
    /// Rule pattern, ended by `==>`.
    Arrow,
    /// Trigger body, ended by `}`.
    Brace,
    /// Alternation branch, ended by `|` or `}`.
    Branch,
}

struct Parser<'s> {
    src: &'s str,
    pos: usize,
    line_starts: Vec<usize>,
    diags: Vec<Diagnostic>,
    contexts: Vec<ContextScript>,
    default_context: Option<String>,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str) -> Self {
        let line_starts = std::iter::once(0).chain(src.match_indices('\n').map(|(i, _)| i + 1)).collect();
        Self { src, pos: 0, line_starts, diags: Vec::new(), contexts: Vec::new(), default_context: None }
    }

    // ---- positions -------------------------------------------------------

    fn line_col(&self, offset: usize) -> (u32, u32) {
        let line = self.line_starts.partition_point(|&s| s <= offset) - 1;
        let col = self.src[self.line_starts[line]..offset].chars().count();
        (line as u32 + 1, col as u32 + 1)
    }

    fn span(&self, start: usize, end: usize) -> Span {
        let (line, column) = self.line_col(start);
        let (end_line, end_column) = self.line_col(end);
        Span { offset: start, len: end - start, line, column, end_line, end_column }
    }

    fn span_from(&self, start: usize) -> Span {
        self.span(start, self.pos.max(start))
    }

    fn error<T>(&mut self, code: Code, start: usize, msg: impl Into<String>) -> PResult<T> {
        let span = self.span_from(start);
        self.diags.push(Diagnostic::error(code, span, msg));
        Err(Abort)
    }

    // ---- cursor ----------------------------------------------------------

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    /// Whitespace and `//` line comments.
    fn skip_trivia(&mut self) {
        loop {
            let before = self.pos;
            while self.peek().is_some_and(char::is_whitespace) {
                self.bump();
            }
            if self.at("//") {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            }
            if self.pos == before {
                break;
            }
        }
    }

    fn skip_inline_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn ident(&mut self) -> Option<String> {
        let first = self.peek()?;
        if !(first.is_alphabetic() || first == '_') {
            return None;
        }
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.bump();
        }
        Some(self.src[start..self.pos].to_string())
    }

    /// Skip past the next `;;` (or to the end of input).
    fn recover(&mut self) {
        match self.rest().find(";;") {
            Some(i) => self.pos += i + 2,
            None => self.pos = self.src.len(),
        }
    }

    /// `ident ::` at the cursor, with `::` standing alone.
    fn at_context_header(&self) -> bool {
        let rest = self.rest();
        let Some(first) = rest.chars().next() else { return false };
        if !(first.is_alphabetic() || first == '_') {
            return false;
        }
        let after_ident = rest.trim_start_matches(is_ident_char);
        let after_ws = after_ident.trim_start();
        after_ws.starts_with("::") && after_ws[2..].chars().next().map_or(true, char::is_whitespace)
    }

    // ---- file / context --------------------------------------------------

    fn parse_file(&mut self) {
        loop {
            self.skip_trivia();
            if self.at_eof() {
                break;
            }
            if self.at("@") {
                if self.parse_pragma().is_err() {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                continue;
            }
            if self.parse_context().is_err() {
                self.recover();
            }
        }
    }

    fn parse_pragma(&mut self) -> PResult<()> {
        let start = self.pos;
        if !self.eat("@default") || !self.peek().is_some_and(char::is_whitespace) {
            return self.error(Code::BadPragma, start, "expected `@default <context>`");
        }
        self.skip_inline_ws();
        match self.ident() {
            Some(name) if self.default_context.is_none() => {
                self.default_context = Some(name);
                Ok(())
            }
            Some(_) => self.error(Code::BadPragma, start, "default context declared twice"),
            None => self.error(Code::BadPragma, start, "expected context name after `@default`"),
        }
    }

    fn parse_context(&mut self) -> PResult<()> {
        let start = self.pos;
        let Some(name) = self.ident() else {
            return self.error(Code::ExpectedContextHeader, start, "expected `context_name ::`");
        };
        self.skip_trivia();
        if !self.eat("::") {
            return self.error(Code::ExpectedContextHeader, start, format!("expected `::` after `{name}`"));
        }
        self.skip_trivia();

        let trigger = if self.at("trigger{") {
            self.pos += "trigger".len();
            let open = self.pos;
            self.bump();
            let pat = self.parse_pattern(PatternEnd::Brace, 0, open)?;
            if !self.eat("}") {
                return self.error(Code::UnbalancedBrace, open, "trigger is missing its closing `}`");
            }
            Some(pat)
        } else {
            None
        };

        let mut rules = Vec::new();
        loop {
            self.skip_trivia();
            if self.at_eof() {
                return self.error(Code::UnterminatedContext, start, format!("context `{name}` is missing `;;`"));
            }
            if self.eat(";;") {
                break;
            }
            if self.at_context_header() {
                let span = self.span_from(start);
                self.diags.push(Diagnostic::error(
                    Code::UnterminatedContext,
                    span,
                    format!("context `{name}` is missing `;;` before the next context"),
                ));
                // Resume at the header rather than skipping the next context.
                return Ok(());
            }
            let ordinal = rules.len();
            rules.push(self.parse_rule(ordinal)?);
        }
        if rules.is_empty() {
            return self.error(Code::EmptyRuleSet, start, format!("context `{name}` has no rules"));
        }
        let span = self.span_from(start);
        self.contexts.push(ContextScript { name, trigger, rules, span });
        Ok(())
    }

    // ---- rules -----------------------------------------------------------

    fn parse_rule(&mut self, ordinal: usize) -> PResult<Rule> {
        let start = self.pos;
        let pattern = self.parse_pattern(PatternEnd::Arrow, 0, start)?;
        if !self.eat("==>") {
            return self.error(Code::MissingArrow, start, "rule pattern is not followed by `==>`");
        }
        self.skip_trivia();
        let open = self.pos;
        if !self.eat("[") {
            return self.error(Code::ExpectedResponse, open, "expected `[` to open the response");
        }
        let response = self.parse_response(open)?;
        let span = self.span_from(start);
        Ok(Rule { pattern, response, ordinal, span })
    }

    fn parse_pattern(&mut self, end: PatternEnd, depth: usize, start: usize) -> PResult<PatternExpr> {
        let mut elements = Vec::new();
        loop {
            self.skip_trivia();
            let here = self.pos;
            let Some(c) = self.peek() else {
                return match end {
                    PatternEnd::Arrow => self.error(Code::MissingArrow, start, "input ended before `==>`"),
                    _ => self.error(Code::UnbalancedBrace, start, "input ended inside `{ }`"),
                };
            };
            match c {
                '*' => {
                    self.bump();
                    elements.push(PatternElement::Wildcard);
                }
                '{' => {
                    self.bump();
                    elements.push(self.parse_alternation(depth + 1, here)?);
                }
                '|' | '}' => {
                    if end == PatternEnd::Arrow || (end == PatternEnd::Brace && c == '|') {
                        return self.error(Code::UnbalancedBrace, here, format!("unexpected `{c}` in pattern"));
                    }
                    break;
                }
                '[' => return self.error(Code::MissingArrow, start, "response found before `==>`"),
                ']' => return self.error(Code::UnbalancedBrace, here, "unexpected `]` in pattern"),
                _ if self.at("==>") => {
                    if end != PatternEnd::Arrow {
                        return self.error(Code::UnbalancedBrace, start, "`{` is not closed before `==>`");
                    }
                    break;
                }
                _ if self.at(";;") => {
                    return match end {
                        PatternEnd::Arrow => self.error(Code::MissingArrow, start, "rule has no `==>`"),
                        _ => self.error(Code::UnbalancedBrace, start, "`{` is not closed before `;;`"),
                    };
                }
                _ => {
                    let word = self.pattern_word();
                    let mut toks = Vec::new();
                    split_word(word, &mut toks);
                    elements.extend(toks.into_iter().map(PatternElement::Literal));
                }
            }
        }
        if elements.is_empty() && end != PatternEnd::Branch {
            return self.error(Code::EmptyPattern, start, "pattern has no elements");
        }
        Ok(PatternExpr { elements })
    }

    fn pattern_word(&mut self) -> &'s str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '*' | '{' | '}' | '|' | '[' | ']') || self.at("==>") {
                break;
            }
            self.bump();
        }
        &self.src[start..self.pos]
    }

    /// Cursor is just past `{`.
    fn parse_alternation(&mut self, depth: usize, open: usize) -> PResult<PatternElement> {
        if depth > MAX_ALTERNATION_DEPTH {
            return self.error(Code::AlternationTooDeep, open, "alternations nest at most one level deep");
        }
        let mut branches = Vec::new();
        loop {
            let branch_start = self.pos;
            let branch = self.parse_pattern(PatternEnd::Branch, depth, open)?;
            if branch.elements.is_empty() {
                return self.error(Code::EmptyAlternation, branch_start, "alternation branch is empty");
            }
            branches.push(branch);
            match self.bump() {
                Some('|') => continue,
                Some('}') => break,
                _ => return self.error(Code::UnbalancedBrace, open, "unterminated alternation"),
            }
        }
        if branches.len() < 2 {
            return self.error(Code::SingleBranchAlternation, open, "alternation needs at least two branches");
        }
        Ok(PatternElement::Alternation(branches))
    }

    // ---- responses -------------------------------------------------------

    /// Cursor is just past `[`.
    fn parse_response(&mut self, open: usize) -> PResult<ResponseExpr> {
        let mut alternatives = Vec::new();
        loop {
            let body_start = self.pos;
            let body = self.parse_body(open)?;
            if body.items.is_empty() {
                return self.error(Code::EmptyResponse, body_start, "response alternative is empty");
            }
            alternatives.push(body);
            match self.bump() {
                Some('|') => continue,
                Some(']') => break,
                _ => return self.error(Code::UnterminatedResponse, open, "response is missing `]`"),
            }
        }
        Ok(ResponseExpr { alternatives })
    }

    fn parse_body(&mut self, open: usize) -> PResult<ResponseBody> {
        let mut raw: Vec<ResponseItem> = Vec::new();
        let mut text = String::new();
        loop {
            let here = self.pos;
            match self.peek() {
                None => return self.error(Code::UnterminatedResponse, open, "response is missing `]`"),
                Some('|' | ']') => break,
                Some('[') => return self.error(Code::UnterminatedResponse, open, "response is missing `]`"),
                Some('^') => {
                    self.bump();
                    let n = self.capture_index(here)?;
                    flush_text(&mut text, &mut raw);
                    raw.push(ResponseItem::Capture(n));
                }
                Some('#') => {
                    if !self.eat("#goto") {
                        return self.error(Code::UnknownAction, here, "only `#goto` actions are supported");
                    }
                    let action = self.parse_goto(here)?;
                    flush_text(&mut text, &mut raw);
                    raw.push(ResponseItem::Action(action));
                }
                Some(c) => {
                    text.push(c);
                    self.bump();
                }
            }
        }
        flush_text(&mut text, &mut raw);
        Ok(ResponseBody { items: tidy_body(raw) })
    }

    /// Cursor is just past `^`.
    fn capture_index(&mut self, start: usize) -> PResult<usize> {
        let digits_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == digits_start {
            return self.error(Code::BadCapture, start, "`^` must be followed by a capture number");
        }
        match self.src[digits_start..self.pos].parse() {
            Ok(n) => Ok(n),
            Err(_) => self.error(Code::BadCapture, start, "capture number is too large"),
        }
    }

    /// Cursor is just past `#goto`.
    fn parse_goto(&mut self, start: usize) -> PResult<Action> {
        self.skip_inline_ws();
        if !self.eat("(") {
            return self.error(Code::BadGotoArity, start, "expected `(` after `#goto`");
        }
        self.skip_inline_ws();
        let Some(target) = self.ident() else {
            return self.error(Code::BadGotoArity, start, "`#goto` needs a target context");
        };
        self.skip_inline_ws();
        let synthetic = if self.eat(",") {
            self.skip_inline_ws();
            let arg_start = self.pos;
            if self.eat("^") {
                Some(vec![SyntheticItem::Capture(self.capture_index(arg_start)?)])
            } else if self.eat("<<") {
                let items = self.parse_synthetic(arg_start)?;
                if items.is_empty() {
                    return self.error(Code::BadGotoArity, arg_start, "synthetic input `<< >>` is empty");
                }
                Some(items)
            } else {
                return self.error(Code::BadGotoArity, arg_start, "second `#goto` argument must be `^n` or `<<...>>`");
            }
        } else {
            None
        };
        self.skip_inline_ws();
        if !self.eat(")") {
            return self.error(Code::BadGotoArity, start, "`#goto` takes one or two arguments");
        }
        Ok(Action::goto(target, synthetic))
    }

    /// Cursor is just past `<<`.
    fn parse_synthetic(&mut self, start: usize) -> PResult<Vec<SyntheticItem>> {
        let mut items = Vec::new();
        let mut text = String::new();
        loop {
            let here = self.pos;
            if self.eat(">>") {
                break;
            }
            match self.peek() {
                None | Some(']' | '|') => {
                    return self.error(Code::BadGotoArity, start, "synthetic input is missing `>>`")
                }
                Some('^') => {
                    self.bump();
                    let n = self.capture_index(here)?;
                    push_synthetic_text(&mut text, &mut items);
                    items.push(SyntheticItem::Capture(n));
                }
                Some(c) => {
                    text.push(c);
                    self.bump();
                }
            }
        }
        push_synthetic_text(&mut text, &mut items);
        if let Some(SyntheticItem::Text(t)) = items.first_mut() {
            *t = t.trim_start().to_string();
        }
        if let Some(SyntheticItem::Text(t)) = items.last_mut() {
            *t = t.trim_end().to_string();
        }
        items.retain(|i| !matches!(i, SyntheticItem::Text(t) if t.is_empty()));
        Ok(items)
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Letters, digits and `_`, not starting with a digit.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_') && chars.all(is_ident_char)
}

pub(crate) fn collapse_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_ws = false;
    for c in s.chars() {
        if c.is_whitespace() {
            in_ws = true;
        } else {
            if in_ws {
                out.push(' ');
            }
            in_ws = false;
            out.push(c);
        }
    }
    if in_ws {
        out.push(' ');
    }
    out
}

fn flush_text(text: &mut String, items: &mut Vec<ResponseItem>) {
    if !text.is_empty() {
        items.push(ResponseItem::Text(collapse_ws(text)));
        text.clear();
    }
}

fn push_synthetic_text(text: &mut String, items: &mut Vec<SyntheticItem>) {
    if !text.is_empty() {
        items.push(SyntheticItem::Text(collapse_ws(text)));
        text.clear();
    }
}

/// Trim text at body edges and next to actions; drop what becomes empty.
fn tidy_body(items: Vec<ResponseItem>) -> Vec<ResponseItem> {
    let n = items.len();
    let is_action = |i: Option<&ResponseItem>| matches!(i, None | Some(ResponseItem::Action(_)));
    let mut out = Vec::with_capacity(n);
    for (i, item) in items.iter().enumerate() {
        match item {
            ResponseItem::Text(t) => {
                let mut t = t.as_str();
                if is_action(if i == 0 { None } else { items.get(i - 1) }) {
                    t = t.trim_start();
                }
                if is_action(items.get(i + 1)) {
                    t = t.trim_end();
                }
                if !t.is_empty() {
                    out.push(ResponseItem::Text(t.to_string()));
                }
            }
            other => out.push(other.clone()),
        }
    }
    out
}
