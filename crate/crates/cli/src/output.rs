//! Atomic result directories with a checksummed manifest.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::Artifact;

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub started: String,
    pub wall_seconds: f64,
    pub threads: usize,
    pub config: ExperimentConfig,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, started: DateTime<Utc>, wall_seconds: f64, artifacts: &[Artifact]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            experiment: config.experiment.to_string(),
            started: started.to_rfc3339(),
            wall_seconds,
            threads: rayon::current_num_threads(),
            config: config.clone(),
            files: artifacts
                .iter()
                .map(|a| FileEntry {
                    name: a.name.clone(),
                    bytes: a.body.len(),
                    sha256: sha256_hex(&a.body),
                })
                .collect(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Where results go: the explicit `--output` directory, or a timestamped
/// directory under the configured (or current) directory.
pub fn resolve_destination(explicit: Option<&Path>, config: &ExperimentConfig, started: DateTime<Utc>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let base = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            let stamp = started.format("%Y%m%dT%H%M%S%.3fZ").to_string().replace('.', "");
            let mut dest = base.join(format!("{}_{stamp}", config.experiment));
            let mut n = 1;
            while dest.exists() {
                dest = base.join(format!("{}_{stamp}_{n}", config.experiment));
                n += 1;
            }
            dest
        }
    }
}

/// Fails unless `dest` is absent or an empty directory.
pub fn check_destination(dest: &Path) -> Result<(), CliError> {
    if !dest.exists() {
        return Ok(());
    }
    if !dest.is_dir() {
        return Err(CliError::Validation(format!("{} exists and is not a directory", dest.display())));
    }
    if fs::read_dir(dest)?.next().is_some() {
        return Err(CliError::Validation(format!("{} is not empty", dest.display())));
    }
    Ok(())
}

/// Writes everything into a staging directory beside `dest` and renames it
/// into place, so an interrupted run leaves nothing at `dest`.
pub fn commit(dest: &Path, artifacts: &[Artifact], manifest: &Manifest) -> Result<(), CliError> {
    check_destination(dest)?;
    let parent = match dest.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent)?;
    let leaf = dest
        .file_name()
        .ok_or_else(|| CliError::Validation(format!("bad output path {}", dest.display())))?
        .to_string_lossy()
        .into_owned();
    let staging = parent.join(format!(".{leaf}.partial-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir(&staging)?;
    let result = (|| -> Result<(), CliError> {
        for a in artifacts {
            fs::write(staging.join(&a.name), &a.body)?;
        }
        let mut body = serde_json::to_vec_pretty(manifest)?;
        body.push(b'\n');
        fs::write(staging.join("manifest.json"), body)?;
        if dest.exists() {
            fs::remove_dir(dest)?;
        }
        fs::rename(&staging, dest)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&staging);
    }
    result
}
