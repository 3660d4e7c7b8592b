//! Syntax tree for context scripts.
//!
//! Source positions are carried on contexts and rules for diagnostics but do
//! not take part in equality: two trees are equal when they describe the same
//! program, wherever it came from.

use std::fmt;

/// Byte range in (normalized) source text plus its 1-based line/column bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
    pub line: u32,
    pub column: u32,
    pub end_line: u32,
    pub end_column: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A parsed collection of context scripts: the agent's behavioural program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptSet {
    /// Source order; trigger search walks this list front to back.
    pub contexts: Vec<ContextScript>,
    pub default_context: String,
    pub source_name: String,
}

impl ScriptSet {
    pub fn context(&self, name: &str) -> Option<&ContextScript> {
        self.contexts.iter().find(|c| c.name == name)
    }

    pub fn context_index(&self, name: &str) -> Option<usize> {
        self.contexts.iter().position(|c| c.name == name)
    }

    pub fn context_names(&self) -> impl Iterator<Item = &str> {
        self.contexts.iter().map(|c| c.name.as_str())
    }
}

#[derive(Debug, Clone, Eq)]
pub struct ContextScript {
    pub name: String,
    pub trigger: Option<PatternExpr>,
    pub rules: Vec<Rule>,
    pub span: Span,
}

impl ContextScript {
    /// A context without a trigger accepts any input once it is current.
    pub fn activatable_by_any_input(&self) -> bool {
        self.trigger.is_none()
    }
}

impl PartialEq for ContextScript {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.trigger == other.trigger && self.rules == other.rules
    }
}

#[derive(Debug, Clone, Eq)]
pub struct Rule {
    pub pattern: PatternExpr,
    pub response: ResponseExpr,
    /// Index of this rule within its context.
    pub ordinal: usize,
    pub span: Span,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.pattern == other.pattern && self.response == other.response && self.ordinal == other.ordinal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternExpr {
    pub elements: Vec<PatternElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternElement {
    /// `*`: zero or more tokens.
    Wildcard,
    /// Exactly one token, compared case-sensitively.
    Literal(String),
    /// `{ a | b | ... }`, at least two branches.
    Alternation(Vec<PatternExpr>),
}

impl PatternExpr {
    pub fn new(elements: Vec<PatternElement>) -> Self {
        Self { elements }
    }

    /// Number of wildcards that are bound under every choice of alternation
    /// branches. Capture indices `1..=n` are always safe to reference.
    pub fn guaranteed_wildcards(&self) -> usize {
        self.elements
            .iter()
            .map(|el| match el {
                PatternElement::Wildcard => 1,
                PatternElement::Literal(_) => 0,
                PatternElement::Alternation(branches) => {
                    branches.iter().map(PatternExpr::guaranteed_wildcards).min().unwrap_or(0)
                }
            })
            .sum()
    }

    /// Deepest alternation nesting; a flat pattern has depth 0.
    pub fn alternation_depth(&self) -> usize {
        self.elements
            .iter()
            .map(|el| match el {
                PatternElement::Alternation(branches) => {
                    1 + branches.iter().map(PatternExpr::alternation_depth).max().unwrap_or(0)
                }
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Every flattening of the pattern obtained by picking one branch per
    /// alternation, in branch order.
    pub fn expansions(&self) -> Vec<Vec<FlatElement>> {
        let mut out = vec![Vec::new()];
        for el in &self.elements {
            match el {
                PatternElement::Wildcard => out.iter_mut().for_each(|v| v.push(FlatElement::Wildcard)),
                PatternElement::Literal(t) => {
                    out.iter_mut().for_each(|v| v.push(FlatElement::Literal(t.clone())))
                }
                PatternElement::Alternation(branches) => {
                    let tails: Vec<_> = branches.iter().flat_map(PatternExpr::expansions).collect();
                    out = out
                        .into_iter()
                        .flat_map(|head| {
                            tails.iter().map(move |tail| {
                                let mut v = head.clone();
                                v.extend(tail.iter().cloned());
                                v
                            })
                        })
                        .collect();
                }
            }
        }
        out
    }
}

/// A pattern element after alternations have been resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FlatElement {
    Wildcard,
    Literal(String),
}

/// Bracketed response: `[ body | body | ... ]`, bodies used in rotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseExpr {
    pub alternatives: Vec<ResponseBody>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseBody {
    pub items: Vec<ResponseItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseItem {
    Text(String),
    /// `^n`; `^0` is the whole input.
    Capture(usize),
    Action(Action),
}

impl ResponseBody {
    pub fn new(items: Vec<ResponseItem>) -> Self {
        Self { items }
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.items.iter().filter_map(|i| match i {
            ResponseItem::Action(a) => Some(a),
            _ => None,
        })
    }

    /// All capture indices referenced, including those inside goto arguments.
    pub fn capture_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                ResponseItem::Capture(n) => out.push(*n),
                ResponseItem::Action(a) => {
                    if let Some(syn) = &a.synthetic_input {
                        out.extend(syn.iter().filter_map(|s| match s {
                            SyntheticItem::Capture(n) => Some(*n),
                            SyntheticItem::Text(_) => None,
                        }));
                    }
                }
                ResponseItem::Text(_) => {}
            }
        }
        out
    }
}

/// Response action. Only context transfer exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub kind: ActionKind,
    pub target: String,
    /// Utterance replayed in the target context after the transfer.
    pub synthetic_input: Option<Vec<SyntheticItem>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Goto,
}

impl Action {
    pub fn goto(target: impl Into<String>, synthetic_input: Option<Vec<SyntheticItem>>) -> Self {
        Self { kind: ActionKind::Goto, target: target.into(), synthetic_input }
    }
}

/// Piece of a synthetic utterance: no nested actions allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntheticItem {
    Text(String),
    Capture(usize),
}
