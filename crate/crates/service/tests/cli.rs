use std::path::PathBuf;
use std::process::{Command, Output};

fn packs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/packs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framechat")).args(args).output().unwrap()
}

fn path(rel: &str) -> String {
    packs().join(rel).display().to_string()
}

#[test]
fn validate_reports_ordering_warning_but_succeeds() {
    let out = run(&["validate", &path("fixtures/misordered")]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.matches("warning[RuleOrdering]").count(), 1, "{stderr}");
    assert!(stderr.contains("rule 0") && stderr.contains("rule 1"));
}

#[test]
fn validate_fails_on_errors() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.fscript");
    std::fs::write(&file, "a :: * ==> [ #goto(nowhere) ] ;;\n").unwrap();
    let out = run(&["validate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnknownGotoTarget"));
}

#[test]
fn replay_golden_transcripts() {
    for t in ["prerequisite", "subject_kinds"] {
        let out = run(&["replay", "academic_regulation", &path(&format!("academic_regulation/transcripts/{t}.jsonl"))]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let out = run(&[
        "replay",
        &path("fixtures/misordered_both"),
        &path("academic_regulation/transcripts/subject_kinds.jsonl"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("turn 2"));
}

#[test]
fn stats_on_shipped_corpus() {
    let out = run(&["stats", &path("academic_regulation/corpus")]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("accuracy: 79.4%"), "{stdout}");

    let out = run(&["stats", "--json", &path("academic_regulation/corpus")]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["accuracy_percent"], 79.4);
    assert_eq!(v["avg_interactions_headline"], 14);
}

#[test]
fn graph_formats() {
    let out = run(&["graph"]);
    assert!(String::from_utf8_lossy(&out.stdout).lines().any(|l| l == "mon_hoc -> mon_hoc_tien_quyet"));
    let out = run(&["graph", "--dot"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("digraph \"academic_regulation\" {"));
}

#[test]
fn chat_reads_stdin_and_records() {
    use std::io::Write;
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_framechat"))
        .args(["--transcripts", dir.path().to_str().unwrap(), "chat"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all("môn học tiên quyết là gì?\n".as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("Môn học tiên quyết"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("context=mon_hoc_tien_quyet"));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
}
