//! Brute-force reference matcher.
//!
//! Enumerates every branch choice and every way of splitting the input among
//! the wildcards, then keeps the lexicographically smallest decision vector
//! (branch indices and wildcard lengths, in pattern order). It shares no code
//! with [`super::match_pattern`] and exists to check it.

use thiserror::Error;

use crate::script::{PatternElement, PatternExpr};

use super::pattern::{MatchResult, TokenSpan};
use super::tokenize::TokenSeq;

/// Longest input the exhaustive search accepts.
pub const ORACLE_MAX_TOKENS: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("input has {0} tokens; the oracle handles at most {ORACLE_MAX_TOKENS}")]
    InputTooLong(usize),
}

#[derive(Debug, Clone)]
enum Step {
    Branch(usize),
    Wildcard,
    Literal(String),
}

fn paths(elements: &[PatternElement]) -> Vec<Vec<Step>> {
    let mut acc: Vec<Vec<Step>> = vec![Vec::new()];
    for el in elements {
        acc = match el {
            PatternElement::Wildcard => acc
                .into_iter()
                .map(|mut p| {
                    p.push(Step::Wildcard);
                    p
                })
                .collect(),
            PatternElement::Literal(t) => acc
                .into_iter()
                .map(|mut p| {
                    p.push(Step::Literal(t.clone()));
                    p
                })
                .collect(),
            PatternElement::Alternation(branches) => {
                let mut options = Vec::new();
                for (i, b) in branches.iter().enumerate() {
                    for mut sub in paths(&b.elements) {
                        sub.insert(0, Step::Branch(i));
                        options.push(sub);
                    }
                }
                let mut next = Vec::new();
                for p in &acc {
                    for o in &options {
                        let mut q = p.clone();
                        q.extend(o.iter().cloned());
                        next.push(q);
                    }
                }
                next
            }
        };
    }
    acc
}

/// All ways to write `total` as an ordered sum of `parts` non-negative terms.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn oracle_match(pattern: &PatternExpr, input: &TokenSeq) -> Result<MatchResult, OracleError> {
    let n = input.tokens.len();
    if n > ORACLE_MAX_TOKENS {
        return Err(OracleError::InputTooLong(n));
    }
    let mut best: Option<(Vec<usize>, Vec<TokenSpan>)> = None;
    for path in paths(&pattern.elements) {
        let wildcards = path.iter().filter(|s| matches!(s, Step::Wildcard)).count();
        let literals = path.iter().filter(|s| matches!(s, Step::Literal(_))).count();
        if literals > n {
            continue;
        }
        'split: for lengths in compositions(n - literals, wildcards) {
            let mut pos = 0;
            let mut lens = lengths.iter();
            let mut decisions = Vec::new();
            let mut spans = Vec::new();
            for step in &path {
                match step {
                    Step::Branch(i) => decisions.push(*i),
                    Step::Wildcard => {
                        let len = *lens.next().expect("one length per wildcard");
                        decisions.push(len);
                        spans.push(TokenSpan::new(pos, pos + len));
                        pos += len;
                    }
                    Step::Literal(t) => {
                        if input.tokens[pos] != *t {
                            continue 'split;
                        }
                        pos += 1;
                    }
                }
            }
            debug_assert_eq!(pos, n);
            if best.as_ref().map_or(true, |(d, _)| decisions < *d) {
                best = Some((decisions, spans));
            }
        }
    }
    Ok(match best {
        Some((_, spans)) => MatchResult {
            matched: true,
            captures: spans.into_iter().enumerate().map(|(i, s)| (i + 1, s)).collect(),
            whole: TokenSpan::new(0, n),
        },
        None => MatchResult::no_match(n),
    })
}
