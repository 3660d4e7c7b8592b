//! Knowledge packs: a manifest naming script files, the default context and
//! golden transcripts.
//!
//! Script files are concatenated in manifest order, so their contexts keep
//! that order for trigger search.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::script::{is_identifier, parse_script_set, validate, Diagnostic, ScriptSet, Severity};
use crate::store::{read_jsonl, InteractionRecord, StoreError};

pub const MANIFEST_FILE: &str = "pack.toml";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackManifest {
    pub name: String,
    pub locale: String,
    pub default_context: String,
    /// Relative to the manifest's directory.
    pub script_files: Vec<PathBuf>,
    #[serde(default)]
    pub golden_transcripts: Vec<PathBuf>,
    /// Fixture packs that intentionally trip lint warnings set this.
    #[serde(default)]
    pub expect_warnings: bool,
}

/// A diagnostic attributed to the script file it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackDiagnostic {
    pub file: PathBuf,
    pub line: u32,
    pub column: u32,
    pub diagnostic: Diagnostic,
}

impl fmt::Display for PackDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.diagnostic;
        let sev = match d.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}:{}: {}[{}]: {}", self.file.display(), self.line, self.column, sev, d.code, d.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenTranscript {
    pub path: PathBuf,
    pub records: Vec<InteractionRecord>,
}

#[derive(Debug, Clone)]
pub struct LoadedPack {
    pub manifest: PackManifest,
    pub set: ScriptSet,
    pub transcripts: Vec<GoldenTranscript>,
    /// Lint warnings; only non-empty for packs with `expect_warnings`.
    pub warnings: Vec<PackDiagnostic>,
}

#[derive(Debug, Error)]
pub enum PackError {
    #[error("missing file: {}", .0.display())]
    ManifestMissing(PathBuf),
    #[error("{}: {message}", path.display())]
    ManifestInvalid { path: PathBuf, message: String },
    #[error("pack failed validation:\n{}", render_list(.0))]
    PackValidationFailed(Vec<PackDiagnostic>),
    #[error("golden transcript {}: {source}", path.display())]
    Transcript { path: PathBuf, source: StoreError },
}

fn render_list(diags: &[PackDiagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

/// Load a pack from a manifest file or a directory containing `pack.toml`.
pub fn load_pack(path: &Path) -> Result<LoadedPack, PackError> {
    let manifest_path = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
    let base = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    load_with(&manifest_path, |rel| std::fs::read_to_string(base.join(rel)).ok(), |rel| base.join(rel))
}

macro_rules! embedded {
    ($($file:literal),* $(,)?) => {
        &[$(($file, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/packs/academic_regulation/", $file)))),*]
    };
}

static SHIPPED: &[(&str, &str)] = embedded![
    "pack.toml",
    "quy_che_dao_tao.fscript",
    "quy_dinh.fscript",
    "tin_chi.fscript",
    "mon_hoc.fscript",
    "mon_hoc_loai.fscript",
    "mon_hoc_tien_quyet.fscript",
    "khoa_luan.fscript",
    "transcripts/prerequisite.jsonl",
    "transcripts/subject_kinds.jsonl",
];

pub const SHIPPED_PACK_NAME: &str = "academic_regulation";

/// The academic-regulation pack compiled into the binary.
pub fn shipped_pack() -> LoadedPack {
    let lookup = |rel: &Path| SHIPPED.iter().find(|(p, _)| Path::new(p) == rel).map(|(_, text)| text.to_string());
    load_with(Path::new(MANIFEST_FILE), lookup, |rel| PathBuf::from(SHIPPED_PACK_NAME).join(rel))
        .expect("embedded pack is valid")
}

/// Source directory of the shipped pack inside this crate.
pub fn shipped_pack_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("packs").join(SHIPPED_PACK_NAME)
}

/// Everything read from a pack before the warning policy is applied.
#[derive(Debug, Clone)]
pub struct PackCheck {
    pub manifest: PackManifest,
    /// `None` when a script file failed to parse.
    pub set: Option<ScriptSet>,
    /// Parse errors, or validation errors and warnings.
    pub diagnostics: Vec<PackDiagnostic>,
}

impl PackCheck {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.diagnostic.is_error())
    }
}

/// Parse and validate a pack, reporting every diagnostic without failing on
/// them. Missing or malformed manifests and files are still errors.
pub fn check_pack(path: &Path) -> Result<PackCheck, PackError> {
    let manifest_path = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
    let base = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    check_with(&manifest_path, |rel| std::fs::read_to_string(base.join(rel)).ok(), |rel| base.join(rel))
}

fn check_with(
    manifest_path: &Path,
    read: impl Fn(&Path) -> Option<String>,
    display: impl Fn(&Path) -> PathBuf,
) -> Result<PackCheck, PackError> {
    let manifest_name = manifest_path.file_name().map(PathBuf::from).unwrap_or_default();
    let text = read(&manifest_name).ok_or_else(|| PackError::ManifestMissing(manifest_path.to_path_buf()))?;
    let manifest: PackManifest = toml::from_str(&text)
        .map_err(|e| PackError::ManifestInvalid { path: manifest_path.to_path_buf(), message: e.to_string() })?;
    if !is_identifier(&manifest.name) {
        return Err(PackError::ManifestInvalid {
            path: manifest_path.to_path_buf(),
            message: format!("pack name `{}` is not an identifier", manifest.name),
        });
    }
    if manifest.script_files.is_empty() {
        return Err(PackError::ManifestInvalid { path: manifest_path.to_path_buf(), message: "no script files".into() });
    }

    // One combined source; remember where each file starts so diagnostics
    // can be mapped back.
    let mut combined = String::new();
    let mut starts: Vec<(u32, PathBuf)> = Vec::new();
    for rel in &manifest.script_files {
        let src = read(rel).ok_or_else(|| PackError::ManifestMissing(display(rel)))?;
        starts.push((combined.lines().count() as u32 + 1, display(rel)));
        combined.push_str(&src);
        if !combined.ends_with('\n') {
            combined.push('\n');
        }
    }
    let attribute = |d: Diagnostic| {
        let (first_line, file) = starts.iter().rev().find(|(l, _)| *l <= d.span.line).cloned().unwrap_or_else(|| starts[0].clone());
        PackDiagnostic { file, line: d.span.line - first_line + 1, column: d.span.column, diagnostic: d }
    };

    match parse_script_set(&combined, &manifest.name) {
        Err(diags) => Ok(PackCheck { manifest, set: None, diagnostics: diags.into_iter().map(attribute).collect() }),
        Ok(mut set) => {
            set.default_context = manifest.default_context.clone();
            let diagnostics = validate(&set).into_iter().map(attribute).collect();
            Ok(PackCheck { manifest, set: Some(set), diagnostics })
        }
    }
}

fn load_with(
    manifest_path: &Path,
    read: impl Fn(&Path) -> Option<String>,
    display: impl Fn(&Path) -> PathBuf,
) -> Result<LoadedPack, PackError> {
    let check = check_with(manifest_path, &read, &display)?;
    let (errors, warnings): (Vec<_>, Vec<_>) = check.diagnostics.into_iter().partition(|d| d.diagnostic.is_error());
    let set = match check.set {
        Some(set) if errors.is_empty() && (warnings.is_empty() || check.manifest.expect_warnings) => set,
        _ => return Err(PackError::PackValidationFailed(errors.into_iter().chain(warnings).collect())),
    };

    let mut transcripts = Vec::new();
    for rel in &check.manifest.golden_transcripts {
        let text = read(rel).ok_or_else(|| PackError::ManifestMissing(display(rel)))?;
        let path = display(rel);
        let records = read_jsonl(&text, &path.display().to_string())
            .map_err(|source| PackError::Transcript { path: path.clone(), source })?;
        transcripts.push(GoldenTranscript { path, records });
    }
    Ok(LoadedPack { manifest: check.manifest, set, transcripts, warnings })
}
