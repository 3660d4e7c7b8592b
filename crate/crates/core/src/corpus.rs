//! Synthetic labeled evaluation corpus.
//!
//! Student utterances from a real deployment are not available, so the
//! shipped corpus is generated: 30 sessions, 417 interactions, with
//! satisfaction labels, failure reasons and end-of-session ratings whose
//! totals are fixed. Utterances are drawn from small per-label pools and
//! responses come from running the engine, so the corpus always replays
//! clean against the pack it was generated from.

use std::path::Path;

use crate::engine::Engine;
use crate::store::{write_jsonl, FailureReason, InteractionRecord, StoreError, TranscriptCorpus, RATINGS_FILE};

pub const SESSIONS: usize = 30;
pub const INTERACTIONS: usize = 417;
pub const SATISFIED: usize = 331;
pub const PATTERN_FAILURES: usize = 75;
pub const HIERARCHY_FAILURES: usize = 11;
/// Counts of ratings 1 through 5.
pub const RATING_COUNTS: [usize; 5] = [3, 1, 13, 9, 4];

/// Stride used to scatter the sorted label and rating lists. Coprime with
/// both 417 and 30, so it permutes.
const STRIDE: usize = 97;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Satisfied,
    Failed(FailureReason),
}

const SATISFIED_POOL: &[&str] = &[
    "môn học tiên quyết là gì?",
    "tín chỉ là gì?",
    "Các loại môn học trong giảng dạy tín chỉ?",
    "hình thức dạy học gồm những gì?",
    "môn học điều kiện là gì?",
    "giờ tín chỉ được tính thế nào?",
    "lên lớp là gì?",
    "thực hành là gì?",
    "tự học bắt buộc là gì?",
    "chương trình đào tạo có những khối kiến thức nào?",
    "hình thức đào tạo gồm những gì?",
    "môn học bắt buộc là gì?",
    "môn học tự chọn là gì?",
    "khóa luận là gì?",
    "quy định về đào tạo theo tín chỉ thế nào?",
    "Có. Tôi muốn biết.",
    "Không, cảm ơn.",
];

const PATTERN_POOL: &[&str] = &[
    "điểm trung bình tích lũy tính ra sao?",
    "học phí một kỳ là bao nhiêu?",
    "khi nào được xét tốt nghiệp?",
    "làm sao để đăng ký học lại?",
    "bị cảnh báo học vụ thì sao?",
    "em có được học vượt không?",
    "thi lại tối đa mấy lần?",
    "xin nghỉ học tạm thời thế nào?",
    "TC là gì?",
];

const HIERARCHY_POOL: &[&str] = &[
    "số tín chỉ của môn học bắt buộc là bao nhiêu?",
    "thực hành có tính giờ tín chỉ không?",
    "khóa luận có phải môn học bắt buộc không?",
    "môn học điều kiện có tính tín chỉ không?",
    "lên lớp bao nhiêu giờ tín chỉ?",
];

fn labels() -> Vec<Label> {
    let mut base = vec![Label::Satisfied; SATISFIED];
    base.extend(std::iter::repeat(Label::Failed(FailureReason::PatternConstruction)).take(PATTERN_FAILURES));
    base.extend(std::iter::repeat(Label::Failed(FailureReason::HierarchyOrganization)).take(HIERARCHY_FAILURES));
    (0..INTERACTIONS).map(|i| base[(i * STRIDE) % INTERACTIONS]).collect()
}

fn ratings() -> Vec<u8> {
    let base: Vec<u8> = RATING_COUNTS.iter().enumerate().flat_map(|(k, &n)| std::iter::repeat(k as u8 + 1).take(n)).collect();
    (0..SESSIONS).map(|j| base[(j * STRIDE) % SESSIONS]).collect()
}

/// Turns in session `j`: all 14 except the last three, which have 13.
fn session_len(j: usize) -> usize {
    if j < SESSIONS - 3 {
        14
    } else {
        13
    }
}

pub fn session_id(j: usize) -> String {
    format!("s{:02}", j + 1)
}

/// Build the corpus by driving a fresh engine session per student.
pub fn generate_corpus(engine: &Engine) -> TranscriptCorpus {
    let labels = labels();
    let ratings = ratings();
    let mut corpus = TranscriptCorpus::default();
    let mut counters = [0usize; 3];
    let mut i = 0;
    for j in 0..SESSIONS {
        let sid = session_id(j);
        let mut state = engine.new_session();
        for turn in 1..=session_len(j) {
            let label = labels[i];
            let (pool, slot) = match label {
                Label::Satisfied => (SATISFIED_POOL, 0),
                Label::Failed(FailureReason::PatternConstruction) => (PATTERN_POOL, 1),
                Label::Failed(FailureReason::HierarchyOrganization) => (HIERARCHY_POOL, 2),
            };
            let utterance = pool[counters[slot] % pool.len()];
            counters[slot] += 1;
            let result = engine.process_turn(&mut state, utterance);
            let mut rec = InteractionRecord::from_turn(&sid, turn as u32, utterance, &result);
            match label {
                Label::Satisfied => rec.satisfied = Some(true),
                Label::Failed(reason) => {
                    rec.satisfied = Some(false);
                    rec.failure_reason = Some(reason);
                }
            }
            corpus.records.push(rec);
            i += 1;
        }
        corpus.ratings.push((sid, ratings[j]));
    }
    debug_assert_eq!(i, INTERACTIONS);
    corpus
}

/// File name to contents, as [`write_corpus`] lays them out.
pub fn corpus_files(corpus: &TranscriptCorpus) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let mut ids: Vec<&str> = corpus.records.iter().map(|r| r.session_id.as_str()).collect();
    ids.dedup();
    for sid in ids {
        let recs: Vec<InteractionRecord> = corpus.records.iter().filter(|r| r.session_id == sid).cloned().collect();
        files.push((format!("{sid}.jsonl"), write_jsonl(&recs)));
    }
    let ratings: String = corpus.ratings.iter().map(|(sid, r)| format!("{sid}\t{r}\n")).collect();
    files.push((RATINGS_FILE.to_string(), ratings));
    files
}

pub fn write_corpus(corpus: &TranscriptCorpus, dir: &Path) -> Result<(), StoreError> {
    let io = |source| StoreError::Io { path: dir.display().to_string(), source };
    std::fs::create_dir_all(dir).map_err(io)?;
    for (name, text) in corpus_files(corpus) {
        std::fs::write(dir.join(name), text).map_err(io)?;
    }
    Ok(())
}
