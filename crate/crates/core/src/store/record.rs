use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Origin, TurnResult};

/// Why a response was judged unsatisfying.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    /// The rule patterns did not cover the phrasing used.
    PatternConstruction,
    /// The context hierarchy sent the conversation to the wrong place.
    HierarchyOrganization,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::PatternConstruction => "pattern_construction",
            FailureReason::HierarchyOrganization => "hierarchy_organization",
        }
    }
}

/// One logged turn. Serialized as one JSON object per line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionRecord {
    pub session_id: String,
    /// 1-based, consecutive within a session.
    pub turn: u32,
    pub utterance: String,
    pub response: String,
    pub matched_context: Option<String>,
    pub transitions: Vec<String>,
    pub origin: Origin,
    pub satisfied: Option<bool>,
    pub failure_reason: Option<FailureReason>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("session id must not be empty")]
    EmptySessionId,
    #[error("turn numbers start at 1")]
    ZeroTurn,
    #[error("failure_reason is only allowed when satisfied is false")]
    MisplacedFailureReason,
}

impl InteractionRecord {
    /// Unlabeled record for a turn the system just answered.
    pub fn from_turn(session_id: impl Into<String>, turn: u32, utterance: impl Into<String>, result: &TurnResult) -> Self {
        Self {
            session_id: session_id.into(),
            turn,
            utterance: utterance.into(),
            response: result.response_text.clone(),
            matched_context: result.matched_context.clone(),
            transitions: result.transitions.clone(),
            origin: result.origin,
            satisfied: None,
            failure_reason: None,
        }
    }

    /// Checks that hold for a record on its own.
    pub fn check(&self) -> Result<(), RecordError> {
        if self.session_id.is_empty() {
            return Err(RecordError::EmptySessionId);
        }
        if self.turn == 0 {
            return Err(RecordError::ZeroTurn);
        }
        if self.failure_reason.is_some() && self.satisfied != Some(false) {
            return Err(RecordError::MisplacedFailureReason);
        }
        Ok(())
    }
}
