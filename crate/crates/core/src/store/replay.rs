use crate::engine::{Engine, Origin};
use crate::script::parse::collapse_ws;

use super::record::InteractionRecord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub session_id: String,
    pub turn: u32,
    pub expected_response: String,
    pub actual_response: String,
    pub expected_transitions: Vec<String>,
    pub actual_transitions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayReport {
    Clean { sessions: usize, turns: usize },
    Diverged(Divergence),
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        matches!(self, ReplayReport::Clean { .. })
    }
}

fn norm(s: &str) -> String {
    collapse_ws(s).trim().to_string()
}

/// Re-run each session's utterances through a fresh engine session and
/// report the first turn whose response or transitions differ.
///
/// Turns answered by the QA provider never reached the engine, so they are
/// skipped rather than replayed.
pub fn replay_transcript(engine: &Engine, transcript: &[InteractionRecord]) -> ReplayReport {
    let mut order: Vec<&str> = Vec::new();
    for r in transcript {
        if !order.contains(&r.session_id.as_str()) {
            order.push(&r.session_id);
        }
    }
    let mut turns = 0;
    for sid in &order {
        let mut records: Vec<&InteractionRecord> = transcript.iter().filter(|r| r.session_id == *sid).collect();
        records.sort_by_key(|r| r.turn);
        let mut state = engine.new_session();
        for rec in records {
            if rec.origin == Origin::Qa {
                continue;
            }
            turns += 1;
            let got = engine.process_turn(&mut state, &rec.utterance);
            if norm(&got.response_text) != norm(&rec.response) || got.transitions != rec.transitions {
                return ReplayReport::Diverged(Divergence {
                    session_id: rec.session_id.clone(),
                    turn: rec.turn,
                    expected_response: rec.response.clone(),
                    actual_response: got.response_text,
                    expected_transitions: rec.transitions.clone(),
                    actual_transitions: got.transitions,
                });
            }
        }
    }
    ReplayReport::Clean { sessions: order.len(), turns }
}
