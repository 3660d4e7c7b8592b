use std::collections::HashSet;

use super::ast::*;
use super::diagnostic::{Diagnostic, DiagnosticCode as Code};

/// Semantic checks over a parsed set. Never fails; problems come back as
/// diagnostics (errors for broken references, warnings for rule ordering).
pub fn validate(set: &ScriptSet) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let names: HashSet<&str> = set.context_names().collect();

    let mut seen = HashSet::new();
    for ctx in &set.contexts {
        if !seen.insert(ctx.name.as_str()) {
            diags.push(Diagnostic::error(
                Code::DuplicateContext,
                ctx.span,
                format!("context `{}` is defined more than once", ctx.name),
            ));
        }
    }

    if !names.contains(set.default_context.as_str()) {
        let span = set.contexts.first().map(|c| c.span).unwrap_or_default();
        diags.push(Diagnostic::error(
            Code::UnknownDefaultContext,
            span,
            format!("default context `{}` does not exist", set.default_context),
        ));
    }

    for ctx in &set.contexts {
        for rule in &ctx.rules {
            check_rule(ctx, rule, &names, &mut diags);
        }
        check_ordering(ctx, &mut diags);
    }
    diags
}

fn check_rule(ctx: &ContextScript, rule: &Rule, names: &HashSet<&str>, diags: &mut Vec<Diagnostic>) {
    let bound = rule.pattern.guaranteed_wildcards();
    for body in &rule.response.alternatives {
        for action in body.actions() {
            if !names.contains(action.target.as_str()) {
                diags.push(Diagnostic::error(
                    Code::UnknownGotoTarget,
                    rule.span,
                    format!("`#goto({})` in context `{}` rule {} names no known context", action.target, ctx.name, rule.ordinal),
                ));
            }
        }
        for n in body.capture_indices() {
            if n > bound {
                diags.push(Diagnostic::error(
                    Code::CaptureOutOfRange,
                    rule.span,
                    format!(
                        "`^{n}` in context `{}` rule {} exceeds the pattern's {bound} wildcard(s)",
                        ctx.name, rule.ordinal
                    ),
                ));
            }
        }
    }
}

/// Literal-token sequences of every branch expansion of a pattern.
fn literal_sequences(pattern: &PatternExpr) -> Vec<Vec<String>> {
    pattern
        .expansions()
        .into_iter()
        .map(|flat| {
            flat.into_iter()
                .filter_map(|el| match el {
                    FlatElement::Literal(t) => Some(t),
                    FlatElement::Wildcard => None,
                })
                .collect()
        })
        .collect()
}

fn is_subsequence(needle: &[String], haystack: &[String]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

/// `earlier` is a strict generalization of `later`: its literals occur in
/// order inside `later`'s literals and the two sequences differ.
pub fn generalizes(earlier: &PatternExpr, later: &PatternExpr) -> bool {
    let a = literal_sequences(earlier);
    let b = literal_sequences(later);
    a.iter().any(|sa| b.iter().any(|sb| sa != sb && is_subsequence(sa, sb)))
}

/// One warning per rule that shadows at least one later rule of its context.
fn check_ordering(ctx: &ContextScript, diags: &mut Vec<Diagnostic>) {
    for (i, rule) in ctx.rules.iter().enumerate() {
        let shadowed: Vec<usize> = ctx.rules[i + 1..]
            .iter()
            .filter(|later| generalizes(&rule.pattern, &later.pattern))
            .map(|later| later.ordinal)
            .collect();
        let Some(&first) = shadowed.first() else { continue };
        let all = shadowed.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
        diags.push(Diagnostic::warning(
            Code::RuleOrdering,
            rule.span,
            format!(
                "context `{}`: rule {} is more general than later rule {first} and will shadow it \
                 (shadowed rules: {all}); place it after them",
                ctx.name, rule.ordinal
            ),
        ));
    }
}

/// Warnings emitted for a single context, by (general, first shadowed) ordinals.
pub fn ordering_pairs(ctx: &ContextScript) -> Vec<(usize, usize)> {
    ctx.rules
        .iter()
        .enumerate()
        .filter_map(|(i, rule)| {
            ctx.rules[i + 1..]
                .iter()
                .find(|later| generalizes(&rule.pattern, &later.pattern))
                .map(|later| (rule.ordinal, later.ordinal))
        })
        .collect()
}
