use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::{FailureReason, InteractionRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sessions: usize,
    pub interactions: usize,
    pub satisfied: usize,
    /// Percentage rounded half-up to one decimal.
    pub accuracy_percent: f64,
    pub avg_interactions_per_session: f64,
    /// `avg_interactions_per_session` rounded half-up to an integer.
    pub avg_interactions_headline: u64,
    pub failure_breakdown: BTreeMap<FailureReason, usize>,
    /// Unsatisfied interactions without a failure label.
    pub unlabeled_failures: usize,
    /// Keys 1 through 5, always present.
    pub rating_histogram: BTreeMap<u8, usize>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("no interactions to score")]
    EmptyCorpus,
    #[error("rating {0} is outside 1..=5")]
    InvalidRating(u8),
}

/// `num / den` rounded half-up, in units of `1/scale`.
fn round_half_up(num: u64, den: u64, scale: u64) -> u64 {
    (2 * num * scale + den) / (2 * den)
}

pub fn compute_stats(records: &[InteractionRecord], ratings: &[u8]) -> Result<CorpusStats, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let interactions = records.len();
    let sessions = records.iter().map(|r| r.session_id.as_str()).collect::<BTreeSet<_>>().len();
    let satisfied = records.iter().filter(|r| r.satisfied == Some(true)).count();

    let mut failure_breakdown = BTreeMap::new();
    for reason in records.iter().filter(|r| r.satisfied != Some(true)).filter_map(|r| r.failure_reason) {
        *failure_breakdown.entry(reason).or_insert(0) += 1;
    }
    let labeled: usize = failure_breakdown.values().sum();

    let mut rating_histogram: BTreeMap<u8, usize> = (1..=5).map(|k| (k, 0)).collect();
    for &r in ratings {
        *rating_histogram.get_mut(&r).ok_or(StatsError::InvalidRating(r))? += 1;
    }

    let tenths = round_half_up(satisfied as u64, interactions as u64, 1000);
    Ok(CorpusStats {
        sessions,
        interactions,
        satisfied,
        accuracy_percent: tenths as f64 / 10.0,
        avg_interactions_per_session: interactions as f64 / sessions as f64,
        avg_interactions_headline: round_half_up(interactions as u64, sessions as u64, 1),
        failure_breakdown,
        unlabeled_failures: interactions - satisfied - labeled,
        rating_histogram,
    })
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sessions: {}", self.sessions)?;
        writeln!(f, "interactions: {}", self.interactions)?;
        writeln!(f, "satisfied: {}", self.satisfied)?;
        writeln!(f, "accuracy: {:.1}%", self.accuracy_percent)?;
        writeln!(
            f,
            "interactions per session: {} (exact {:.2})",
            self.avg_interactions_headline, self.avg_interactions_per_session
        )?;
        write!(f, "failures:")?;
        for (reason, n) in &self.failure_breakdown {
            write!(f, " {}={}", reason.as_str(), n)?;
        }
        if self.unlabeled_failures > 0 {
            write!(f, " unlabeled={}", self.unlabeled_failures)?;
        }
        writeln!(f)?;
        write!(f, "ratings:")?;
        for (k, n) in &self.rating_histogram {
            write!(f, " {k}={n}")?;
        }
        writeln!(f)
    }
}
