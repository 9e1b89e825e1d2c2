//! Content-addressed run cache: every run writes its artifacts under
//! `<root>/<config-hash>/` next to a `manifest.json` run record. A later
//! invocation with the same config finds the manifest, checks the artifacts
//! are still present, and returns without recomputing, so repeated runs are
//! byte-identical by construction.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::ARTIFACT_VERSION;
use crate::CliError;

pub const CACHE_ENV: &str = "OSC_CACHE_DIR";
pub const DEFAULT_ROOT: &str = "osclab-out";

/// Run record persisted as `manifest.json`. The wall-clock stamp is
/// provenance about the run itself and is deliberately the only
/// non-reproducible byte in a run directory; the data artifacts listed in
/// `files` depend on the config alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub version: String,
    pub created_unix: u64,
    /// Canonical phase literal when the subcommand has one.
    pub phase: Option<String>,
    pub subcommand: String,
    pub files: Vec<String>,
}

/// Resolve the cache root: env override, then --out, then the default.
pub fn cache_root(out_flag: Option<&Path>) -> PathBuf {
    if let Ok(dir) = std::env::var(CACHE_ENV) {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    out_flag.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_ROOT))
}

pub fn run_dir(root: &Path, hash: &str) -> PathBuf {
    root.join(hash)
}

/// A cache hit is a readable manifest whose artifacts all still exist.
pub fn lookup(dir: &Path) -> Option<RunRecord> {
    let text = std::fs::read_to_string(dir.join("manifest.json")).ok()?;
    let record: RunRecord = serde_json::from_str(&text).ok()?;
    if record.files.iter().all(|f| dir.join(f).is_file()) {
        Some(record)
    } else {
        None
    }
}

/// Write artifacts and their manifest; the manifest goes last so a partial
/// write never looks like a valid cache entry.
pub fn store(
    dir: &Path,
    hash: &str,
    subcommand: &str,
    phase: Option<String>,
    artifacts: &[(String, String)],
) -> Result<RunRecord, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    for (name, bytes) in artifacts {
        std::fs::write(dir.join(name), bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {name}: {e}")))?;
    }
    let record = RunRecord {
        config_hash: hash.to_string(),
        version: ARTIFACT_VERSION.to_string(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        phase,
        subcommand: subcommand.to_string(),
        files: artifacts.iter().map(|(n, _)| n.clone()).collect(),
    };
    let manifest = serde_json::to_string_pretty(&record).expect("record serializes");
    std::fs::write(dir.join("manifest.json"), manifest)
        .map_err(|e| CliError::Usage(format!("cannot write manifest: {e}")))?;
    Ok(record)
}

/// The comment line opening every CSV artifact.
pub fn csv_header(hash: &str) -> String {
    format!("# config={hash} version={ARTIFACT_VERSION}\n")
}
