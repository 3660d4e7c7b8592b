//! Shared proptest strategies.
#![allow(dead_code)]

use framechat_core::script::{
    Action, ContextScript, PatternElement, PatternExpr, ResponseBody, ResponseExpr, ResponseItem, Rule, ScriptSet,
    Span, SyntheticItem,
};
use proptest::collection::vec;
use proptest::prelude::*;

const WORDS: &[&str] = &["môn", "học", "tiên", "quyết", "Có", "có", "gì", "?", ",", "tín", "chỉ", "x1", "khóa", "luận"];

pub fn name() -> impl Strategy<Value = String> {
    "[a-z_][a-z0-9_]{0,6}".prop_filter("reserved word", |s| s != "trigger")
}

pub fn literal() -> impl Strategy<Value = PatternElement> {
    proptest::sample::select(WORDS).prop_map(|w| PatternElement::Literal(w.to_string()))
}

fn flat_branch() -> impl Strategy<Value = PatternExpr> {
    vec(prop_oneof![Just(PatternElement::Wildcard), literal()], 1..4).prop_map(PatternExpr::new)
}

fn element(nest: bool) -> BoxedStrategy<PatternElement> {
    let leaf = prop_oneof![2 => Just(PatternElement::Wildcard), 3 => literal()];
    if nest {
        let branch = vec(
            prop_oneof![3 => Just(PatternElement::Wildcard), 3 => literal(), 1 => vec(flat_branch(), 2..4).prop_map(PatternElement::Alternation)],
            1..4,
        )
        .prop_map(PatternExpr::new);
        prop_oneof![6 => leaf, 1 => vec(branch, 2..4).prop_map(PatternElement::Alternation)].boxed()
    } else {
        leaf.boxed()
    }
}

/// Patterns with alternations nested at most one level.
pub fn pattern() -> impl Strategy<Value = PatternExpr> {
    vec(element(true), 1..6).prop_map(PatternExpr::new)
}

fn text() -> impl Strategy<Value = String> {
    "[a-zA-Zàáạảãâầấậẩẫăằắặẳẵèéẹẻẽêềếệểễđ0-9 .,?!:;*{}/()'-]{1,16}"
}

fn collapse(s: &str) -> String {
    let mut out = String::new();
    let mut ws = false;
    for c in s.chars() {
        if c.is_whitespace() {
            ws = true;
        } else {
            if ws {
                out.push(' ');
            }
            ws = false;
            out.push(c);
        }
    }
    if ws {
        out.push(' ');
    }
    out
}

fn synthetic() -> impl Strategy<Value = Option<Vec<SyntheticItem>>> {
    let item = prop_oneof![text().prop_map(SyntheticItem::Text), (0usize..4).prop_map(SyntheticItem::Capture)];
    prop_oneof![
        Just(None),
        (0usize..4).prop_map(|n| Some(vec![SyntheticItem::Capture(n)])),
        vec(item, 1..4).prop_map(|items| Some(canonical_synthetic(items)).filter(|v| !v.is_empty())),
    ]
}

/// Merge adjacent text, collapse whitespace, trim the ends, and keep a digit
/// from directly following a capture.
fn canonical_synthetic(items: Vec<SyntheticItem>) -> Vec<SyntheticItem> {
    let mut out: Vec<SyntheticItem> = Vec::new();
    for it in items {
        match (out.last_mut(), it) {
            (Some(SyntheticItem::Text(prev)), SyntheticItem::Text(t)) => prev.push_str(&t),
            (_, it) => out.push(it),
        }
    }
    for it in &mut out {
        if let SyntheticItem::Text(t) = it {
            *t = collapse(t);
        }
    }
    fix_digits(&mut out, |i| matches!(i, SyntheticItem::Capture(_)), |i| match i {
        SyntheticItem::Text(t) => Some(t),
        _ => None,
    });
    if let Some(SyntheticItem::Text(t)) = out.first_mut() {
        *t = t.trim_start().to_string();
    }
    if let Some(SyntheticItem::Text(t)) = out.last_mut() {
        *t = t.trim_end().to_string();
    }
    out.retain(|i| !matches!(i, SyntheticItem::Text(t) if t.is_empty()));
    out
}

fn fix_digits<T>(items: &mut [T], is_capture: impl Fn(&T) -> bool, text: impl Fn(&mut T) -> Option<&mut String>) {
    for i in 1..items.len() {
        if is_capture(&items[i - 1]) {
            if let Some(t) = text(&mut items[i]) {
                if t.starts_with(|c: char| c.is_ascii_digit()) {
                    t.insert(0, ' ');
                }
            }
        }
    }
}

fn body() -> impl Strategy<Value = ResponseBody> {
    let item = prop_oneof![
        4 => text().prop_map(ResponseItem::Text),
        2 => (0usize..4).prop_map(ResponseItem::Capture),
        1 => (name(), synthetic()).prop_map(|(t, s)| ResponseItem::Action(Action::goto(t, s))),
    ];
    vec(item, 1..5).prop_map(canonical_body).prop_filter("empty body", |b| !b.items.is_empty())
}

/// The form the parser produces: merged, collapsed text trimmed at body
/// edges and next to actions.
fn canonical_body(items: Vec<ResponseItem>) -> ResponseBody {
    let mut merged: Vec<ResponseItem> = Vec::new();
    for it in items {
        match (merged.last_mut(), it) {
            (Some(ResponseItem::Text(prev)), ResponseItem::Text(t)) => prev.push_str(&t),
            (_, it) => merged.push(it),
        }
    }
    for it in &mut merged {
        if let ResponseItem::Text(t) = it {
            *t = collapse(t);
        }
    }
    fix_digits(&mut merged, |i| matches!(i, ResponseItem::Capture(_)), |i| match i {
        ResponseItem::Text(t) => Some(t),
        _ => None,
    });
    let n = merged.len();
    let edge = |i: Option<&ResponseItem>| matches!(i, None | Some(ResponseItem::Action(_)));
    let mut out = Vec::new();
    for i in 0..n {
        if let ResponseItem::Text(t) = &merged[i] {
            let mut t = t.as_str();
            if edge(if i == 0 { None } else { merged.get(i - 1) }) {
                t = t.trim_start();
            }
            if edge(merged.get(i + 1)) {
                t = t.trim_end();
            }
            if !t.is_empty() {
                out.push(ResponseItem::Text(t.to_string()));
            }
        } else {
            out.push(merged[i].clone());
        }
    }
    // Dropping an empty text can make two texts adjacent again only if it
    // sat between them, which needs a non-text neighbour; nothing to redo.
    ResponseBody::new(out)
}

fn rule() -> impl Strategy<Value = (PatternExpr, ResponseExpr)> {
    (pattern(), vec(body(), 1..4).prop_map(|alternatives| ResponseExpr { alternatives }))
}

fn context() -> impl Strategy<Value = ContextScript> {
    (name(), proptest::option::of(pattern()), vec(rule(), 1..4)).prop_map(|(name, trigger, rules)| ContextScript {
        name,
        trigger,
        rules: rules
            .into_iter()
            .enumerate()
            .map(|(ordinal, (pattern, response))| Rule { pattern, response, ordinal, span: Span::default() })
            .collect(),
        span: Span::default(),
    })
}

/// Syntactically valid sets. Names are unique; gotos and captures are not
/// checked.
pub fn script_set() -> impl Strategy<Value = ScriptSet> {
    (vec(context(), 1..5), any::<proptest::sample::Index>()).prop_map(|(mut contexts, pick)| {
        let mut seen = std::collections::HashSet::new();
        contexts.retain(|c| seen.insert(c.name.clone()));
        let default_context = contexts[pick.index(contexts.len())].name.clone();
        ScriptSet { contexts, default_context, source_name: "generated".into() }
    })
}

/// Sets that also pass `validate` without errors: goto targets are
/// remapped onto existing contexts and captures clamped to the pattern's
/// guaranteed wildcards.
pub fn valid_script_set() -> impl Strategy<Value = ScriptSet> {
    script_set().prop_map(|mut set| {
        let names: Vec<String> = set.contexts.iter().map(|c| c.name.clone()).collect();
        let remap = |t: &str| names[t.bytes().map(usize::from).sum::<usize>() % names.len()].clone();
        for ctx in &mut set.contexts {
            for rule in &mut ctx.rules {
                let bound = rule.pattern.guaranteed_wildcards();
                for body in &mut rule.response.alternatives {
                    for item in &mut body.items {
                        match item {
                            ResponseItem::Capture(n) => *n %= bound + 1,
                            ResponseItem::Action(a) => {
                                a.target = remap(&a.target);
                                for s in a.synthetic_input.iter_mut().flatten() {
                                    if let SyntheticItem::Capture(n) = s {
                                        *n %= bound + 1;
                                    }
                                }
                            }
                            ResponseItem::Text(_) => {}
                        }
                    }
                }
            }
        }
        set
    })
}

/// Small-alphabet patterns and inputs so that matches are common.
pub fn matcher_case() -> impl Strategy<Value = (PatternExpr, Vec<String>)> {
    let tok = || proptest::sample::select(&["a", "b", "c"][..]).prop_map(String::from);
    let lit = move || tok().prop_map(PatternElement::Literal);
    let leaf = move || prop_oneof![2 => Just(PatternElement::Wildcard), 3 => lit()];
    let inner = move || vec(leaf(), 1..4).prop_map(PatternExpr::new);
    let branch = move || {
        vec(prop_oneof![4 => leaf(), 1 => vec(inner(), 2..4).prop_map(PatternElement::Alternation)], 1..4)
            .prop_map(PatternExpr::new)
    };
    let el = prop_oneof![6 => leaf(), 1 => vec(branch(), 2..4).prop_map(PatternElement::Alternation)];
    (vec(el, 1..7).prop_map(PatternExpr::new), vec(tok(), 0..=12))
}
