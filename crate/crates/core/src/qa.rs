//! Question-answering front door.
//!
//! A provider gets the first chance at every utterance. When it has no
//! answer, or fails, the utterance goes to the dialogue engine instead.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use thiserror::Error;
use tracing::warn;

use crate::engine::{DialogueState, Engine, TurnResult};
use crate::matcher::tokenize::punctuation_stripped_key;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QaOutcome {
    /// Non-empty answer text.
    Answered(String),
    NoAnswer,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("provider `{provider}` failed: {message}")]
pub struct ProviderFailure {
    pub provider: String,
    pub message: String,
}

/// Something that may know the answer to a question. Implementations are
/// called from concurrent sessions.
pub trait AnswerProvider: Send + Sync {
    fn id(&self) -> &str;
    fn answer(&self, utterance: &str) -> Result<QaOutcome, ProviderFailure>;
}

/// Exact-question lookup table. Questions compare after tokenization with
/// punctuation tokens removed.
#[derive(Debug, Clone, Default)]
pub struct TableLookupProvider {
    id: String,
    entries: HashMap<String, String>,
}

#[derive(Debug, Error)]
pub enum QaTableError {
    #[error("line {line}: expected `question<TAB>answer`")]
    MalformedLine { line: usize },
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub fn table_lookup_provider<I, Q, A>(entries: I) -> TableLookupProvider
where
    I: IntoIterator<Item = (Q, A)>,
    Q: AsRef<str>,
    A: Into<String>,
{
    TableLookupProvider::new("table", entries)
}

impl TableLookupProvider {
    pub fn new<I, Q, A>(id: impl Into<String>, entries: I) -> Self
    where
        I: IntoIterator<Item = (Q, A)>,
        Q: AsRef<str>,
        A: Into<String>,
    {
        let entries = entries
            .into_iter()
            .map(|(q, a)| (punctuation_stripped_key(q.as_ref()), a.into()))
            .filter(|(_, a)| !a.trim().is_empty())
            .collect();
        Self { id: id.into(), entries }
    }

    /// Parse `question<TAB>answer` lines. Blank lines are skipped.
    pub fn from_tsv(id: impl Into<String>, text: &str) -> Result<Self, QaTableError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (q, a) = line.split_once('\t').ok_or(QaTableError::MalformedLine { line: i + 1 })?;
            if q.trim().is_empty() || a.trim().is_empty() {
                return Err(QaTableError::MalformedLine { line: i + 1 });
            }
            pairs.push((q.to_string(), a.trim().to_string()));
        }
        Ok(Self::new(id, pairs))
    }

    pub fn load(path: &Path) -> Result<Self, QaTableError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| QaTableError::Io { path: path.display().to_string(), source })?;
        Self::from_tsv(path.display().to_string(), &text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl AnswerProvider for TableLookupProvider {
    fn id(&self) -> &str {
        &self.id
    }

    fn answer(&self, utterance: &str) -> Result<QaOutcome, ProviderFailure> {
        Ok(match self.entries.get(&punctuation_stripped_key(utterance)) {
            Some(answer) => QaOutcome::Answered(answer.clone()),
            None => QaOutcome::NoAnswer,
        })
    }
}

/// A provider that never answers.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoProvider;

impl AnswerProvider for NoProvider {
    fn id(&self) -> &str {
        "none"
    }

    fn answer(&self, _: &str) -> Result<QaOutcome, ProviderFailure> {
        Ok(QaOutcome::NoAnswer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GatewayTurn {
    pub result: TurnResult,
    /// Set when the provider errored or panicked and the engine answered.
    pub provider_failure: Option<ProviderFailure>,
}

/// Ask the provider first; delegate to the engine when it has nothing.
/// A provider answer leaves `state` untouched.
pub fn answer_or_delegate(
    engine: &Engine,
    state: &mut DialogueState,
    provider: &dyn AnswerProvider,
    utterance: &str,
) -> GatewayTurn {
    let outcome = match catch_unwind(AssertUnwindSafe(|| provider.answer(utterance))) {
        Ok(Ok(outcome)) => Ok(outcome),
        Ok(Err(failure)) => Err(failure),
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panicked".to_string());
            Err(ProviderFailure { provider: provider.id().to_string(), message })
        }
    };
    match outcome {
        Ok(QaOutcome::Answered(text)) if !text.trim().is_empty() => {
            GatewayTurn { result: TurnResult::answered_by_qa(text), provider_failure: None }
        }
        Ok(_) => GatewayTurn { result: engine.process_turn(state, utterance), provider_failure: None },
        Err(failure) => {
            warn!(provider = %failure.provider, error = %failure.message, "answer provider failed; delegating");
            GatewayTurn { result: engine.process_turn(state, utterance), provider_failure: Some(failure) }
        }
    }
}
