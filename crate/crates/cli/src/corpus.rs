//! `corpus run`: every torus in a directory is classified, and the
//! endomorphism criterion, the declared product form and the hyperplane
//! census must all agree.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use subtori_core::structure::{classify_with_census, Signal};

use crate::error::{CliError, CliResult};
use crate::format::parse_torus;
use crate::report;

pub const MANIFEST: &str = "manifest.json";

/// Expected verdicts, keyed by file name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub members: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub file: String,
    pub condition_ii: bool,
    pub end_dim: usize,
    /// First witness form, when one is expected.
    #[serde(default)]
    pub witness: Option<Vec<String>>,
    /// Where the expected verdict comes from.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberReport {
    pub file: String,
    pub result: Value,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRun {
    pub height: u32,
    pub members: Vec<MemberReport>,
    pub passed: bool,
    pub inputs: Vec<Vec<u8>>,
}

impl CorpusRun {
    pub fn failed_files(&self) -> Vec<String> {
        self.members.iter().filter(|m| !m.failures.is_empty()).map(|m| m.file.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        let members: Vec<Value> = self
            .members
            .iter()
            .map(|m| json!({"file": m.file, "passed": m.failures.is_empty(), "failures": m.failures, "result": m.result}))
            .collect();
        json!({"height": self.height, "passed": self.passed, "members": members})
    }
}

fn torus_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::input("io_error", format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != MANIFEST))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::input("empty_corpus", format!("{}: no torus files", dir.display())));
    }
    Ok(files)
}

fn load_manifest(dir: &Path) -> CliResult<Option<Manifest>> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Ok(None);
    }
    let bytes = std::fs::read(&path).map_err(|e| CliError::input("io_error", format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map(Some)
        .map_err(|e| CliError::input("malformed_manifest", format!("{}: {e}", path.display())))
}

/// Checks one file; `Err` only for unreadable or invalid input.
fn check_member(path: &Path, height: u32, expected: Option<&ManifestEntry>) -> CliResult<(MemberReport, Vec<u8>)> {
    let file = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let (t, bytes) = parse_torus(path)?;
    let n = t.torus.n();
    let (r, census) = classify_with_census(&t.torus, t.product_form.as_deref(), height)
        .map_err(|e| CliError::from(e).at(&path.display().to_string()))?;
    let mut failures = Vec::new();
    match r.diagnostics.witness_signal {
        Signal::Agrees => {}
        Signal::Disagrees => failures.push(format!("criterion says isogenous to a CM power, yet a witness exists at height {height}")),
        Signal::Undetermined => failures.push(format!("criterion says not isogenous to a CM power, but no witness up to height {height}")),
    }
    if r.diagnostics.oracle_agrees == Some(false) {
        failures.push("product-form verdict disagrees with the endomorphism criterion".into());
    }
    if r.condition_ii && census.complex_count != census.total {
        failures.push(format!("{} of {} core closures are not complex", census.total - census.complex_count, census.total));
    }
    if !census.dichotomy_holds(n) {
        failures.push("a core closure has dimension other than 2n-2 or 2n-1".into());
    }
    if let Some(e) = expected {
        if e.condition_ii != r.condition_ii {
            failures.push(format!("manifest expects condition_ii = {}", e.condition_ii));
        }
        if e.end_dim != r.end_dim {
            failures.push(format!("manifest expects end_dim = {}, got {}", e.end_dim, r.end_dim));
        }
        let got: Option<Vec<String>> =
            r.witness.as_ref().map(|w| w.form.entries().iter().map(|x| x.to_string()).collect());
        if e.witness.is_some() && e.witness != got {
            failures.push(format!("manifest expects witness {:?}, got {:?}", e.witness, got));
        }
    }
    let mut result = report::classification(&r);
    result["census"] = json!({"total": census.total, "complex_count": census.complex_count});
    if let Some(name) = t.labels.get("name") {
        result["name"] = json!(name);
    }
    Ok((MemberReport { file, result, failures }, bytes))
}

pub fn corpus_consistency(dir: &Path, height: u32) -> CliResult<CorpusRun> {
    let files = torus_files(dir)?;
    let manifest = load_manifest(dir)?;
    let expected: BTreeMap<&str, &ManifestEntry> =
        manifest.iter().flat_map(|m| m.members.iter().map(|e| (e.file.as_str(), e))).collect();
    let mut members = Vec::with_capacity(files.len());
    let mut inputs = Vec::with_capacity(files.len());
    for path in &files {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let (m, bytes) = check_member(path, height, expected.get(name.as_str()).copied())?;
        members.push(m);
        inputs.push(bytes);
    }
    for file in expected.keys() {
        if !members.iter().any(|m| m.file == *file) {
            members.push(MemberReport {
                file: file.to_string(),
                result: Value::Null,
                failures: vec!["listed in the manifest but missing".into()],
            });
        }
    }
    let passed = members.iter().all(|m| m.failures.is_empty());
    Ok(CorpusRun { height, members, passed, inputs })
}
