use std::collections::BTreeMap;

use crate::script::{PatternElement, PatternExpr};

use super::tokenize::TokenSeq;

/// Half-open token range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
}

impl TokenSpan {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub matched: bool,
    /// Wildcard number (1-based, left to right) to its bound span.
    pub captures: BTreeMap<usize, TokenSpan>,
    /// Capture 0: the whole input.
    pub whole: TokenSpan,
}

impl MatchResult {
    pub fn no_match(input_len: usize) -> Self {
        Self { matched: false, captures: BTreeMap::new(), whole: TokenSpan::new(0, input_len) }
    }

    /// Span bound to `^index`, if any.
    pub fn capture(&self, index: usize) -> Option<TokenSpan> {
        if !self.matched {
            return None;
        }
        if index == 0 {
            Some(self.whole)
        } else {
            self.captures.get(&index).copied()
        }
    }

    /// Space-joined tokens of `^index`; empty when unbound.
    pub fn capture_text(&self, index: usize, input: &TokenSeq) -> String {
        self.capture(index).map(|s| input.tokens[s.start..s.end].join(" ")).unwrap_or_default()
    }
}

/// Anchored match of `pattern` against the whole of `input`.
///
/// Wildcards are lazy and alternation branches are tried in order, so the
/// result is the first success of a left-to-right depth-first search.
pub fn match_pattern(pattern: &PatternExpr, input: &TokenSeq) -> MatchResult {
    let mut search = Search { tokens: &input.tokens, captures: Vec::new() };
    if search.run(&pattern.elements, None, 0) {
        let captures = search.captures.into_iter().enumerate().map(|(i, s)| (i + 1, s)).collect();
        MatchResult { matched: true, captures, whole: TokenSpan::new(0, input.len()) }
    } else {
        MatchResult::no_match(input.len())
    }
}

/// Convenience check without building a result.
pub fn matches(pattern: &PatternExpr, input: &TokenSeq) -> bool {
    let mut search = Search { tokens: &input.tokens, captures: Vec::new() };
    search.run(&pattern.elements, None, 0)
}

/// Continuation: elements still to match after the current slice.
struct Frame<'a> {
    elements: &'a [PatternElement],
    next: Option<&'a Frame<'a>>,
}

struct Search<'t> {
    tokens: &'t [String],
    captures: Vec<TokenSpan>,
}

impl Search<'_> {
    fn run(&mut self, elements: &[PatternElement], next: Option<&Frame<'_>>, pos: usize) -> bool {
        let n = self.tokens.len();
        let Some((first, rest)) = elements.split_first() else {
            return match next {
                Some(frame) => self.run(frame.elements, frame.next, pos),
                None => pos == n,
            };
        };
        match first {
            PatternElement::Wildcard => {
                for end in pos..=n {
                    self.captures.push(TokenSpan::new(pos, end));
                    if self.run(rest, next, end) {
                        return true;
                    }
                    self.captures.pop();
                }
                false
            }
            PatternElement::Literal(t) => pos < n && self.tokens[pos] == *t && self.run(rest, next, pos + 1),
            PatternElement::Alternation(branches) => {
                let frame = Frame { elements: rest, next };
                let mark = self.captures.len();
                for branch in branches {
                    if self.run(&branch.elements, Some(&frame), pos) {
                        return true;
                    }
                    self.captures.truncate(mark);
                }
                false
            }
        }
    }
}
