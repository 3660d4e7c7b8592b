//! Utterance tokenization and pattern matching.

pub mod oracle;
pub mod pattern;
pub mod substitute;
pub mod tokenize;

pub use oracle::{oracle_match, OracleError, ORACLE_MAX_TOKENS};
pub use pattern::{match_pattern, matches, MatchResult, TokenSpan};
pub use substitute::{substitute, ResolvedAction, Substitution};
pub use tokenize::{tokenize, TokenSeq};
