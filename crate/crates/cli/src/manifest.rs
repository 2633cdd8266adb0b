use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// The reproducible part of a run: everything except timestamps. Embedded
/// in JSON artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub command: String,
    /// Arguments after config-file merging; `fdrisk replay` reruns these.
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub inputs: Vec<InputDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub run: RunInfo,
    pub outputs: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let mut hex = String::with_capacity(64);
    for b in Sha256::digest(&bytes).iter() {
        let _ = write!(hex, "{b:02x}");
    }
    Ok(hex)
}

impl RunInfo {
    pub fn new(command: &str, argv: &[String], config: impl Serialize, seed: Option<u64>, inputs: &[&Path]) -> CliResult<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    path: p.display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(RunInfo {
            command: command.to_string(),
            argv: argv.to_vec(),
            config: serde_json::to_value(config)?,
            seed,
            version: fdrisk_core::VERSION.to_string(),
            inputs,
        })
    }
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut name = primary.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    primary.with_file_name(name)
}

pub fn write_manifest(primary: &Path, run: &RunInfo, outputs: &[PathBuf], started_at: String) -> CliResult<PathBuf> {
    let manifest = RunManifest {
        run: run.clone(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        started_at,
        finished_at: now(),
    };
    let path = manifest_path(primary);
    write_json(&path, &manifest)?;
    Ok(path)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
