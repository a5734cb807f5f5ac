//! Reproducibility record written next to every command's outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The only field that differs between identical runs.
    pub created_at: String,
    pub seed: Option<u64>,
    pub config: RunConfig,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<FileHash, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(FileHash { path: path.display().to_string(), sha256: sha256_hex(&bytes) })
}

/// Files written by one command, hashed as they are written.
#[derive(Debug, Default)]
pub struct Outputs {
    root: PathBuf,
    written: Vec<FileHash>,
}

impl Outputs {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Outputs { root: root.into(), written: Vec::new() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `bytes` to `rel` under the output root, creating directories.
    pub fn write(&mut self, rel: impl AsRef<Path>, bytes: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.root.join(rel.as_ref());
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(&path, bytes.as_ref()).map_err(|e| CliError::io(&path, e))?;
        self.written.push(FileHash {
            path: rel.as_ref().to_string_lossy().replace('\\', "/"),
            sha256: sha256_hex(bytes.as_ref()),
        });
        Ok(path)
    }

    pub fn files(&self) -> &[FileHash] {
        &self.written
    }

    pub fn finish(self, command: &str, cfg: &RunConfig, inputs: &[PathBuf]) -> Result<Vec<FileHash>, CliError> {
        let mut hashed = inputs.iter().map(|p| hash_file(p)).collect::<Result<Vec<_>, _>>()?;
        hashed.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed: cfg.seed,
            config: cfg.clone(),
            inputs: hashed,
            outputs: self.written.clone(),
        };
        let path = self.root.join("manifests").join(format!("{command}.json"));
        std::fs::create_dir_all(path.parent().expect("has parent")).map_err(|e| CliError::io(&path, e))?;
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
        Ok(self.written)
    }
}
