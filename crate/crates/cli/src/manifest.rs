//! Run manifests and atomic output writing. Every successful run leaves a
//! `<out>.manifest.json` next to its primary output: the recorded argv plus
//! resolved config reproduce the outputs byte-for-byte under the same binary
//! version.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct Manifest {
    pub tool_version: String,
    pub command: Vec<String>,
    pub resolved_config: serde_json::Value,
    pub seed: Option<u64>,
    pub rng_algorithm: String,
    pub timestamps: Timestamps,
}

#[derive(Serialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Write `content` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("output path {path:?} has no file name")))?;
    let mut tmp = PathBuf::from(dir.unwrap_or_else(|| Path::new(".")));
    tmp.push(format!(
        ".{}.tmp-{}",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, content)
        .map_err(|e| CliError::Data(format!("writing {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Data(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

/// Emit the manifest beside the primary output.
pub fn write_manifest(
    primary_out: &Path,
    argv: &[String],
    resolved_config: serde_json::Value,
    seed: Option<u64>,
    started_unix_ms: u128,
) -> Result<(), CliError> {
    let manifest = Manifest {
        tool_version: TOOL_VERSION.to_string(),
        command: argv.to_vec(),
        resolved_config,
        seed,
        rng_algorithm: tailcert::RNG_ALGORITHM.to_string(),
        timestamps: Timestamps {
            started_unix_ms,
            finished_unix_ms: now_ms(),
        },
    };
    let mut path = primary_out.as_os_str().to_owned();
    path.push(".manifest.json");
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Data(format!("serializing manifest: {e}")))?;
    write_atomic(Path::new(&path), &json)
}
