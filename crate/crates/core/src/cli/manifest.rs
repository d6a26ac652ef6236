use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

/// Written beside a subcommand's outputs as `<command>.manifest.json`.
/// Everything except `created_at` is a function of the inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub inputs: Vec<FileEntry>,
    pub outputs: Vec<FileEntry>,
    pub created_at: DateTime<Utc>,
}

fn digest(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let hash = Sha256::digest(&bytes);
    Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
}

pub struct ManifestBuilder {
    command: String,
    seed: u64,
    out_dir: PathBuf,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn new(command: &str, seed: u64, out_dir: &Path) -> Self {
        Self {
            command: command.to_string(),
            seed,
            out_dir: out_dir.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        if !self.inputs.iter().any(|p| p == path) {
            self.inputs.push(path.to_path_buf());
        }
    }

    /// Registers an output and returns its full path inside the output dir.
    pub fn output(&mut self, name: &str) -> PathBuf {
        let p = self.out_dir.join(name);
        self.outputs.push(p.clone());
        p
    }

    pub fn write(self) -> Result<PathBuf, CliError> {
        let entries = |paths: &[PathBuf], base: Option<&Path>| -> Result<Vec<FileEntry>, CliError> {
            paths
                .iter()
                .filter(|p| p.is_file())
                .map(|p| {
                    let shown = base.and_then(|b| p.strip_prefix(b).ok()).unwrap_or(p);
                    Ok(FileEntry {
                        path: shown.display().to_string(),
                        sha256: digest(p)?,
                    })
                })
                .collect()
        };
        let manifest = RunManifest {
            command: self.command.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            inputs: entries(&self.inputs, None)?,
            outputs: entries(&self.outputs, Some(&self.out_dir))?,
            created_at: Utc::now(),
        };
        let path = self.out_dir.join(format!("{}.manifest.json", self.command));
        super::write_json(&path, &manifest)?;
        Ok(path)
    }
}
