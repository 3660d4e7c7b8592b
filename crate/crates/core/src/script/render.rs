use std::fmt::Write;

use super::ast::*;

/// Canonical source text for a script set. Single spaces between tokens,
/// one rule per line, `;;` on its own line, a blank line between contexts.
pub fn render_script_set(set: &ScriptSet) -> String {
    let mut out = String::new();
    let first = set.contexts.first().map(|c| c.name.as_str());
    if first != Some(set.default_context.as_str()) {
        let _ = writeln!(out, "@default {}\n", set.default_context);
    }
    for (i, ctx) in set.contexts.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        render_context(ctx, &mut out);
    }
    out
}

fn render_context(ctx: &ContextScript, out: &mut String) {
    let _ = writeln!(out, "{} ::", ctx.name);
    if let Some(trigger) = &ctx.trigger {
        let _ = writeln!(out, "trigger{{{}}}", render_pattern(trigger));
    }
    for rule in &ctx.rules {
        let _ = writeln!(out, "{}", render_rule(rule));
    }
    out.push_str(";;\n");
}

pub fn render_rule(rule: &Rule) -> String {
    format!("{} ==> {}", render_pattern(&rule.pattern), render_response(&rule.response))
}

pub fn render_pattern(pattern: &PatternExpr) -> String {
    let parts: Vec<String> = pattern
        .elements
        .iter()
        .map(|el| match el {
            PatternElement::Wildcard => "*".to_string(),
            PatternElement::Literal(t) => t.clone(),
            PatternElement::Alternation(branches) => {
                let inner: Vec<String> = branches.iter().map(render_pattern).collect();
                format!("{{{}}}", inner.join(" | "))
            }
        })
        .collect();
    parts.join(" ")
}

pub fn render_response(response: &ResponseExpr) -> String {
    let bodies: Vec<String> = response.alternatives.iter().map(render_body).collect();
    format!("[ {} ]", bodies.join(" | "))
}

pub fn render_body(body: &ResponseBody) -> String {
    let mut out = String::new();
    let mut prev: Option<&ResponseItem> = None;
    for item in &body.items {
        let touches_action =
            matches!(item, ResponseItem::Action(_)) || matches!(prev, Some(ResponseItem::Action(_)));
        if prev.is_some() && touches_action {
            out.push(' ');
        }
        match item {
            ResponseItem::Text(t) => out.push_str(t),
            ResponseItem::Capture(n) => {
                let _ = write!(out, "^{n}");
            }
            ResponseItem::Action(a) => out.push_str(&render_action(a)),
        }
        prev = Some(item);
    }
    out
}

pub fn render_action(action: &Action) -> String {
    match &action.synthetic_input {
        None => format!("#goto({})", action.target),
        Some(items) => match items.as_slice() {
            [SyntheticItem::Capture(n)] => format!("#goto({}, ^{n})", action.target),
            _ => {
                let mut inner = String::new();
                for item in items {
                    match item {
                        SyntheticItem::Text(t) => inner.push_str(t),
                        SyntheticItem::Capture(n) => {
                            let _ = write!(inner, "^{n}");
                        }
                    }
                }
                format!("#goto({}, <<{inner}>>)", action.target)
            }
        },
    }
}
