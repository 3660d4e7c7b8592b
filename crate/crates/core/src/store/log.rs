use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use thiserror::Error;

use super::record::{InteractionRecord, RecordError};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("session {session}: expected turn {expected}, got {got}")]
    NonConsecutiveTurn { session: String, expected: u32, got: u32 },
    #[error("session {session}: turn {turn} already recorded")]
    DuplicateTurn { session: String, turn: u32 },
    #[error("invalid record: {0}")]
    InvalidRecord(#[from] RecordError),
    #[error("session id `{0}` may only contain letters, digits, `-` and `_`")]
    InvalidSessionId(String),
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

/// Parse line-delimited records. Blank lines are ignored.
pub fn read_jsonl(text: &str, path_label: &str) -> Result<Vec<InteractionRecord>, StoreError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: InteractionRecord = serde_json::from_str(line).map_err(|e| StoreError::Parse {
            path: path_label.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl(records: &[InteractionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records always serialize"));
        out.push('\n');
    }
    out
}

pub fn read_jsonl_file(path: &Path) -> Result<Vec<InteractionRecord>, StoreError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    read_jsonl(&text, &path.display().to_string())
}

fn valid_session_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Per-session interaction log. Either purely in memory or mirrored to one
/// `<session_id>.jsonl` file per session in a directory.
#[derive(Debug)]
pub struct TranscriptStore {
    dir: Option<PathBuf>,
    sessions: Mutex<BTreeMap<String, Vec<InteractionRecord>>>,
}

impl Default for TranscriptStore {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl TranscriptStore {
    pub fn in_memory() -> Self {
        Self { dir: None, sessions: Mutex::new(BTreeMap::new()) }
    }

    /// Open (creating if needed) a directory store. Existing session files
    /// are loaded so turn numbering continues where it left off.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let mut sessions = BTreeMap::new();
        for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let path = entry.map_err(io_err(&dir))?.path();
            if path.extension().is_some_and(|e| e == "jsonl") {
                for rec in read_jsonl_file(&path)? {
                    sessions.entry(rec.session_id.clone()).or_insert_with(Vec::new).push(rec);
                }
            }
        }
        Ok(Self { dir: Some(dir), sessions: Mutex::new(sessions) })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn append(&self, record: InteractionRecord) -> Result<(), StoreError> {
        record.check()?;
        if !valid_session_id(&record.session_id) {
            return Err(StoreError::InvalidSessionId(record.session_id));
        }
        let mut sessions = self.sessions.lock().unwrap_or_else(|p| p.into_inner());
        let log = sessions.entry(record.session_id.clone()).or_default();
        let expected = log.len() as u32 + 1;
        if record.turn < expected {
            return Err(StoreError::DuplicateTurn { session: record.session_id, turn: record.turn });
        }
        if record.turn > expected {
            return Err(StoreError::NonConsecutiveTurn { session: record.session_id, expected, got: record.turn });
        }
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{}.jsonl", record.session_id));
            let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?;
            let mut line = serde_json::to_string(&record).expect("records always serialize");
            line.push('\n');
            file.write_all(line.as_bytes()).map_err(io_err(&path))?;
            file.sync_data().map_err(io_err(&path))?;
        }
        log.push(record);
        Ok(())
    }

    /// Records of one session in turn order; empty if unknown.
    pub fn session(&self, session_id: &str) -> Vec<InteractionRecord> {
        self.sessions.lock().unwrap_or_else(|p| p.into_inner()).get(session_id).cloned().unwrap_or_default()
    }

    pub fn session_ids(&self) -> Vec<String> {
        self.sessions.lock().unwrap_or_else(|p| p.into_inner()).keys().cloned().collect()
    }

    /// Every record, sessions in id order.
    pub fn all_records(&self) -> Vec<InteractionRecord> {
        self.sessions.lock().unwrap_or_else(|p| p.into_inner()).values().flatten().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().unwrap_or_else(|p| p.into_inner()).values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Records and end-of-session ratings read from a transcript directory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TranscriptCorpus {
    pub records: Vec<InteractionRecord>,
    /// `(session_id, rating)` from `ratings.tsv`, in file order.
    pub ratings: Vec<(String, u8)>,
}

pub const RATINGS_FILE: &str = "ratings.tsv";

/// Load every `*.jsonl` file (sorted by name) plus an optional
/// `ratings.tsv` of `session_id<TAB>rating` lines.
pub fn load_transcript_dir(dir: &Path) -> Result<TranscriptCorpus, StoreError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    let mut corpus = TranscriptCorpus::default();
    for f in &files {
        corpus.records.extend(read_jsonl_file(f)?);
    }
    let ratings_path = dir.join(RATINGS_FILE);
    if ratings_path.exists() {
        let text = fs::read_to_string(&ratings_path).map_err(io_err(&ratings_path))?;
        corpus.ratings = parse_ratings(&text, &ratings_path.display().to_string())?;
    }
    Ok(corpus)
}

pub fn parse_ratings(text: &str, path_label: &str) -> Result<Vec<(String, u8)>, StoreError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: &str| StoreError::Parse { path: path_label.to_string(), line: i + 1, message: message.to_string() };
        let (sid, rating) = line.split_once('\t').ok_or_else(|| bad("expected `session_id<TAB>rating`"))?;
        let rating: u8 = rating.trim().parse().map_err(|_| bad("rating is not a number"))?;
        out.push((sid.trim().to_string(), rating));
    }
    Ok(out)
}
