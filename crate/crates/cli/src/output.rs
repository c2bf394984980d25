//! CSV and manifest emission.
//!
//! Floats are printed with 17 significant digits so a re-parse recovers the
//! exact f64 bits, letting reruns be diffed across languages.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// 17-significant-digit float, empty string for a missing value.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn fmt_opt_f64(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

/// Writes rows (header first) as a CSV file.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    version: &'a str,
    command: &'a str,
    seed: u64,
    config_sha256: String,
    effective_config: &'a T,
}

/// Writes `<csv path>.manifest.json` beside the CSV, recording the library
/// version, seed, a hash of the effective config, and the config itself so
/// a run can be reproduced from its manifest alone.
pub fn write_manifest<T: Serialize>(
    csv_path: &Path,
    command: &str,
    seed: u64,
    effective_config: &T,
) -> Result<(), CliError> {
    let config_json = serde_json::to_string(effective_config)
        .map_err(|e| CliError::Io(format!("serializing config: {e}")))?;
    let mut hasher = Sha256::new();
    hasher.update(config_json.as_bytes());
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        config_sha256: hex::encode(hasher.finalize()),
        effective_config,
    };
    let path = manifest_path(csv_path);
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
    fs::write(&path, text)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    Ok(())
}

pub fn manifest_path(csv_path: &Path) -> std::path::PathBuf {
    let mut name = csv_path.as_os_str().to_os_string();
    name.push(".manifest.json");
    std::path::PathBuf::from(name)
}
