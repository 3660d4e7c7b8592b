//! Per-session dialogue state and turn processing.
//!
//! A turn tries the current context's rules in order, then the triggers of
//! the other contexts in file order, and otherwise answers with the fallback
//! response. A matched rule's `#goto` actions move the current context and may
//! replay a synthetic utterance in the new context.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::matcher::{match_pattern, matches, substitute, tokenize, MatchResult, TokenSeq};
use crate::script::{has_errors, validate, ContextScript, Diagnostic, Rule, ScriptSet};

pub const DEFAULT_FALLBACK: &str = "Bạn muốn biết thông tin gì?";
pub const DEFAULT_CYCLE_SUGGESTION: &str =
    "Có vẻ bạn đang chuyển qua lại giữa hai chủ đề. Bạn có muốn tìm hiểu về môn học hoặc chương trình đào tạo không?";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub fallback_response: String,
    /// Gotos executed per turn at most.
    pub max_goto_chain: usize,
    /// Consecutive back-and-forth transitions between one pair of contexts
    /// that trigger the suggestion.
    pub cycle_threshold: usize,
    pub cycle_suggestion: String,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            fallback_response: DEFAULT_FALLBACK.to_string(),
            max_goto_chain: 8,
            cycle_threshold: 3,
            cycle_suggestion: DEFAULT_CYCLE_SUGGESTION.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("script set has {} validation error(s)", .0.len())]
    InvalidScriptSet(Vec<Diagnostic>),
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
}

/// Where a turn's response came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Qa,
    Agent,
    Fallback,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Qa => "qa",
            Origin::Agent => "agent",
            Origin::Fallback => "fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId {
    pub context: String,
    pub ordinal: usize,
}

/// Unordered pair of context names, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextPair(String, String);

impl ContextPair {
    pub fn new(a: &str, b: &str) -> Self {
        if a <= b {
            Self(a.to_string(), b.to_string())
        } else {
            Self(b.to_string(), a.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub turn: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DialogueState {
    pub script_set_id: String,
    pub current_context: String,
    pub rule_cursors: BTreeMap<RuleId, usize>,
    pub transition_log: Vec<Transition>,
    pub turn_count: usize,
    pub cycle_counters: BTreeMap<ContextPair, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnResult {
    pub response_text: String,
    pub matched: bool,
    /// Context of the last rule that fired this turn.
    pub matched_context: Option<String>,
    pub matched_rule_ordinal: Option<usize>,
    /// Contexts entered this turn, in order.
    pub transitions: Vec<String>,
    pub via_trigger: bool,
    pub fallback_used: bool,
    pub cycle_suggested: bool,
    pub origin: Origin,
    /// The per-turn goto cap was hit; the text is what had accumulated.
    pub goto_chain_exceeded: bool,
    /// Goto actions executed this turn, never more than the configured cap.
    pub gotos_executed: usize,
}

impl TurnResult {
    pub fn answered_by_qa(text: String) -> Self {
        Self {
            response_text: text,
            matched: true,
            matched_context: None,
            matched_rule_ordinal: None,
            transitions: Vec::new(),
            via_trigger: false,
            fallback_used: false,
            cycle_suggested: false,
            origin: Origin::Qa,
            goto_chain_exceeded: false,
            gotos_executed: 0,
        }
    }
}

/// An immutable script set plus configuration. Shared by any number of
/// sessions; each session owns its [`DialogueState`].
#[derive(Debug, Clone)]
pub struct Engine {
    set: Arc<ScriptSet>,
    config: EngineConfig,
}

#[derive(Default)]
struct TurnRun {
    texts: Vec<String>,
    transitions: Vec<String>,
    gotos: usize,
    exceeded: bool,
    via_trigger: bool,
    last_rule: Option<(String, usize)>,
    cycle_suggested: bool,
}

impl Engine {
    pub fn new(set: impl Into<Arc<ScriptSet>>, config: EngineConfig) -> Result<Self, EngineError> {
        let set = set.into();
        if config.max_goto_chain < 1 {
            return Err(EngineError::InvalidConfig("max_goto_chain must be at least 1".into()));
        }
        if config.cycle_threshold < 2 {
            return Err(EngineError::InvalidConfig("cycle_threshold must be at least 2".into()));
        }
        let diags = validate(&set);
        if has_errors(&diags) {
            return Err(EngineError::InvalidScriptSet(diags.into_iter().filter(Diagnostic::is_error).collect()));
        }
        Ok(Self { set, config })
    }

    pub fn script_set(&self) -> &Arc<ScriptSet> {
        &self.set
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn new_session(&self) -> DialogueState {
        DialogueState {
            script_set_id: self.set.source_name.clone(),
            current_context: self.set.default_context.clone(),
            rule_cursors: BTreeMap::new(),
            transition_log: Vec::new(),
            turn_count: 0,
            cycle_counters: BTreeMap::new(),
        }
    }

    pub fn process_turn(&self, state: &mut DialogueState, utterance: &str) -> TurnResult {
        state.turn_count += 1;
        let tokens = tokenize(utterance);
        let mut run = TurnRun::default();

        if !self.respond(state, &mut run, &tokens) {
            return TurnResult {
                response_text: self.config.fallback_response.clone(),
                matched: false,
                matched_context: None,
                matched_rule_ordinal: None,
                transitions: Vec::new(),
                via_trigger: false,
                fallback_used: true,
                cycle_suggested: false,
                origin: Origin::Fallback,
                goto_chain_exceeded: false,
                gotos_executed: 0,
            };
        }

        if run.exceeded {
            warn!(turn = state.turn_count, cap = self.config.max_goto_chain, "goto chain limit reached");
        }
        if run.cycle_suggested {
            run.texts.push(self.config.cycle_suggestion.clone());
        }
        let (matched_context, matched_rule_ordinal) = run.last_rule.map_or((None, None), |(c, o)| (Some(c), Some(o)));
        TurnResult {
            response_text: run.texts.join(" "),
            matched: true,
            matched_context,
            matched_rule_ordinal,
            transitions: run.transitions,
            via_trigger: run.via_trigger,
            fallback_used: false,
            cycle_suggested: run.cycle_suggested,
            origin: Origin::Agent,
            goto_chain_exceeded: run.exceeded,
            gotos_executed: run.gotos,
        }
    }

    /// Fresh session, one turn per utterance.
    pub fn replay<S: AsRef<str>>(&self, turns: &[S]) -> Vec<TurnResult> {
        let mut state = self.new_session();
        turns.iter().map(|u| self.process_turn(&mut state, u.as_ref())).collect()
    }

    /// Steps 1-3 of a turn. Returns whether any rule fired; state is only
    /// touched when one did.
    fn respond(&self, state: &mut DialogueState, run: &mut TurnRun, tokens: &TokenSeq) -> bool {
        let current = self
            .set
            .context_index(&state.current_context)
            .expect("current context exists in a validated set");
        if let Some((rule, m)) = first_match(&self.set.contexts[current], tokens) {
            self.fire(state, run, current, rule, &m, tokens);
            return true;
        }
        for (idx, ctx) in self.set.contexts.iter().enumerate() {
            if idx == current {
                continue;
            }
            let Some(trigger) = &ctx.trigger else { continue };
            if !matches(trigger, tokens) {
                continue;
            }
            if let Some((rule, m)) = first_match(ctx, tokens) {
                self.enter(state, run, &ctx.name);
                run.via_trigger = true;
                self.fire(state, run, idx, rule, &m, tokens);
                return true;
            }
        }
        false
    }

    fn fire(
        &self,
        state: &mut DialogueState,
        run: &mut TurnRun,
        ctx_idx: usize,
        rule: &Rule,
        m: &MatchResult,
        tokens: &TokenSeq,
    ) {
        let ctx = &self.set.contexts[ctx_idx];
        run.last_rule = Some((ctx.name.clone(), rule.ordinal));

        let alternatives = &rule.response.alternatives;
        let cursor = state
            .rule_cursors
            .entry(RuleId { context: ctx.name.clone(), ordinal: rule.ordinal })
            .or_insert(0);
        let body = &alternatives[*cursor];
        *cursor = (*cursor + 1) % alternatives.len();

        let sub = substitute(body, m, tokens);
        if !sub.text.is_empty() {
            run.texts.push(sub.text);
        }
        for action in sub.actions {
            if run.gotos >= self.config.max_goto_chain {
                run.exceeded = true;
                return;
            }
            run.gotos += 1;
            self.enter(state, run, &action.target);
            if let Some(synthetic) = action.synthetic_input {
                let replayed = tokenize(&synthetic);
                let tokens = TokenSeq {
                    tokens: replayed.tokens.into_iter().filter(|t| t != "*").collect(),
                    original: synthetic,
                };
                self.respond(state, run, &tokens);
            }
            if run.exceeded {
                return;
            }
        }
    }

    /// Make `target` current, logging the move and updating cycle counters.
    fn enter(&self, state: &mut DialogueState, run: &mut TurnRun, target: &str) {
        if state.current_context == target {
            return;
        }
        let pair = ContextPair::new(&state.current_context, target);
        let continues = state
            .transition_log
            .last()
            .is_some_and(|t| ContextPair::new(&t.from, &t.to) == pair);
        if !continues {
            state.cycle_counters.clear();
        }
        let count = state.cycle_counters.entry(pair).or_insert(0);
        *count += 1;
        if *count >= self.config.cycle_threshold {
            run.cycle_suggested = true;
            *count = 0;
        }

        state.transition_log.push(Transition {
            from: std::mem::replace(&mut state.current_context, target.to_string()),
            to: target.to_string(),
            turn: state.turn_count,
        });
        run.transitions.push(target.to_string());
    }
}

fn first_match<'c>(ctx: &'c ContextScript, tokens: &TokenSeq) -> Option<(&'c Rule, MatchResult)> {
    ctx.rules.iter().find_map(|rule| {
        let m = match_pattern(&rule.pattern, tokens);
        m.matched.then_some((rule, m))
    })
}

/// Replay utterances from a fresh session with the default configuration.
pub fn replay<S: AsRef<str>>(set: &ScriptSet, turns: &[S]) -> Result<Vec<TurnResult>, EngineError> {
    Ok(Engine::new(set.clone(), EngineConfig::default())?.replay(turns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse_script_set;

    fn engine(src: &str) -> Engine {
        Engine::new(parse_script_set(src, "t").unwrap(), EngineConfig::default()).unwrap()
    }

    #[test]
    fn single_context_is_current() {
        let e = engine("only :: * ==> [ x ] ;;");
        let s = e.new_session();
        assert_eq!(s.current_context, "only");
        assert_eq!(s.turn_count, 0);
        assert!(s.rule_cursors.is_empty() && s.cycle_counters.is_empty());
    }

    #[test]
    fn invalid_set_and_config_rejected() {
        let set = parse_script_set("a :: * ==> [ #goto(nowhere) ] ;;", "t").unwrap();
        assert!(matches!(Engine::new(set.clone(), EngineConfig::default()), Err(EngineError::InvalidScriptSet(d)) if d.len() == 1));
        let ok = parse_script_set("a :: * ==> [ x ] ;;", "t").unwrap();
        let cfg = EngineConfig { cycle_threshold: 1, ..EngineConfig::default() };
        assert!(matches!(Engine::new(ok.clone(), cfg), Err(EngineError::InvalidConfig(_))));
        let cfg = EngineConfig { max_goto_chain: 0, ..EngineConfig::default() };
        assert!(matches!(Engine::new(ok, cfg), Err(EngineError::InvalidConfig(_))));
    }

    #[test]
    fn fallback_when_nothing_matches() {
        let e = engine("a :: hello ==> [ hi ] ;;\nb :: trigger{* bye *} * bye * ==> [ ciao ] ;;");
        let mut s = e.new_session();
        let r = e.process_turn(&mut s, "xyzzy");
        assert!(!r.matched && r.fallback_used);
        assert_eq!(r.origin, Origin::Fallback);
        assert_eq!(r.response_text, DEFAULT_FALLBACK);
        assert!(r.transitions.is_empty());
        assert_eq!(s.current_context, "a");
    }

    #[test]
    fn current_rules_beat_triggers_and_trigger_activates() {
        let src = "a :: * x * ==> [ from a ] ;;\n\
                   b :: trigger{* x *} * x * ==> [ from b ] \n * y * ==> [ b y ] ;;\n\
                   c :: trigger{* y *} * y * ==> [ from c ] ;;";
        let e = engine(src);
        let mut s = e.new_session();
        let r = e.process_turn(&mut s, "x");
        assert_eq!((r.response_text.as_str(), r.via_trigger), ("from a", false));
        let r = e.process_turn(&mut s, "y");
        // b is not current and its trigger needs x; c's trigger fires
        assert_eq!(r.response_text, "from c");
        assert!(r.via_trigger);
        assert_eq!(r.transitions, ["c"]);
        assert_eq!(s.current_context, "c");
        assert_eq!(s.transition_log, [Transition { from: "a".into(), to: "c".into(), turn: 2 }]);
    }

    #[test]
    fn trigger_without_matching_rule_keeps_scanning() {
        let src = "a :: q ==> [ a ] ;;\n\
                   b :: trigger{* z *} never ==> [ b ] ;;\n\
                   c :: trigger{* z *} * z * ==> [ c ] ;;";
        let e = engine(src);
        let mut s = e.new_session();
        let r = e.process_turn(&mut s, "z");
        assert_eq!(r.response_text, "c");
        assert_eq!(r.transitions, ["c"]);
    }

    #[test]
    fn triggerless_other_context_is_skipped() {
        let e = engine("a :: q ==> [ a ] ;;\nb :: * ==> [ b ] ;;");
        let mut s = e.new_session();
        assert!(e.process_turn(&mut s, "anything").fallback_used);
    }

    #[test]
    fn response_alternatives_rotate() {
        let e = engine("a :: * ==> [ one | two | three ] ;;");
        let texts: Vec<_> = e.replay(&["x", "x", "x", "x"]).into_iter().map(|r| r.response_text).collect();
        assert_eq!(texts, ["one", "two", "three", "one"]);
    }

    #[test]
    fn goto_with_synthetic_input_drops_wildcards() {
        let src = "a :: * go * ==> [ ok #goto(b, <<* target ^2 *>>) ] ;;\n\
                   b :: target here ==> [ arrived ] ;;";
        let e = engine(src);
        let mut s = e.new_session();
        let r = e.process_turn(&mut s, "go here");
        assert_eq!(r.response_text, "ok arrived");
        assert_eq!(r.transitions, ["b"]);
        assert_eq!(r.matched_context.as_deref(), Some("b"));
        assert_eq!(r.matched_rule_ordinal, Some(0));
    }

    #[test]
    fn goto_chain_is_capped() {
        let src = "a :: * ==> [ a #goto(b, ^0) ] ;;\nb :: * ==> [ b #goto(a, ^0) ] ;;";
        let cfg = EngineConfig { max_goto_chain: 3, cycle_threshold: 10, ..EngineConfig::default() };
        let e = Engine::new(parse_script_set(src, "t").unwrap(), cfg).unwrap();
        let mut s = e.new_session();
        let r = e.process_turn(&mut s, "loop");
        assert!(r.goto_chain_exceeded);
        assert_eq!(r.transitions.len(), 3);
        assert_eq!(r.response_text, "a b a b");
        assert_eq!(r.transitions.last().unwrap(), &s.current_context);
    }

    #[test]
    fn goto_without_input_only_moves() {
        let e = engine("a :: * ==> [ bye #goto(b) ] ;;\nb :: * ==> [ in b ] ;;");
        let mut s = e.new_session();
        let r = e.process_turn(&mut s, "x");
        assert_eq!(r.response_text, "bye");
        assert_eq!(s.current_context, "b");
        assert_eq!(e.process_turn(&mut s, "x").response_text, "in b");
    }

    #[test]
    fn cycle_suggestion_after_threshold() {
        let src = "a :: * to b * ==> [ A #goto(b) ] ;;\nb :: * to a * ==> [ B #goto(a) ] ;;";
        let e = engine(src);
        let mut s = e.new_session();
        let flags: Vec<bool> =
            ["to b", "to a", "to b", "to a"].iter().map(|u| e.process_turn(&mut s, u).cycle_suggested).collect();
        assert_eq!(flags, [false, false, true, false]);
        let mut s = e.new_session();
        e.process_turn(&mut s, "to b");
        e.process_turn(&mut s, "to a");
        let r = e.process_turn(&mut s, "to b");
        assert!(r.response_text.ends_with(DEFAULT_CYCLE_SUGGESTION));
    }

    #[test]
    fn replay_is_deterministic() {
        let e = engine("a :: * ==> [ 1 | 2 ] ;;");
        assert_eq!(e.replay(&["x", "y", "z"]), e.replay(&["x", "y", "z"]));
        assert!(e.replay::<&str>(&[]).is_empty());
    }
}
