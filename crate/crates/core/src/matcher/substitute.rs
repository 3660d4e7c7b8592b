use crate::script::{ActionKind, ResponseBody, ResponseItem, SyntheticItem};
use crate::script::parse::collapse_ws;

use super::pattern::MatchResult;
use super::tokenize::TokenSeq;

/// A goto whose synthetic input has been filled in from the match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedAction {
    pub kind: ActionKind,
    pub target: String,
    pub synthetic_input: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Substitution {
    pub text: String,
    /// Actions in body order, not yet executed.
    pub actions: Vec<ResolvedAction>,
}

/// Fill captures into a response body and collect its actions.
pub fn substitute(body: &ResponseBody, result: &MatchResult, input: &TokenSeq) -> Substitution {
    let mut text = String::new();
    let mut actions = Vec::new();
    for item in &body.items {
        match item {
            ResponseItem::Text(t) => text.push_str(t),
            ResponseItem::Capture(n) => text.push_str(&result.capture_text(*n, input)),
            ResponseItem::Action(a) => actions.push(ResolvedAction {
                kind: a.kind,
                target: a.target.clone(),
                synthetic_input: a.synthetic_input.as_ref().map(|items| {
                    let mut s = String::new();
                    for it in items {
                        match it {
                            SyntheticItem::Text(t) => s.push_str(t),
                            SyntheticItem::Capture(n) => s.push_str(&result.capture_text(*n, input)),
                        }
                    }
                    collapse_ws(&s).trim().to_string()
                }),
            }),
        }
    }
    Substitution { text: collapse_ws(&text).trim().to_string(), actions }
}
