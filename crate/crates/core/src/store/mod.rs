//! Interaction logs, transcript replay, corpus metrics and the static
//! context graph.

pub mod graph;
pub mod log;
pub mod record;
pub mod replay;
pub mod stats;

pub use graph::{context_graph, dot, edge_list, ContextGraph};
pub use log::{load_transcript_dir, parse_ratings, RATINGS_FILE, read_jsonl, read_jsonl_file, write_jsonl, StoreError, TranscriptCorpus, TranscriptStore};
pub use record::{FailureReason, InteractionRecord, RecordError};
pub use replay::{replay_transcript, Divergence, ReplayReport};
pub use stats::{compute_stats, CorpusStats, StatsError};
