//! Run manifest: seeds, versions, stage statuses, and artifact checksums.
//! Deliberately clock-free so identical runs produce identical manifests.

use ranklab_core::io::write_atomic;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StageStatus {
    Written,
    Skipped { reason: String },
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: String,
    #[serde(flatten)]
    pub status: StageStatus,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub desk_scale: bool,
    pub stages: Vec<StageRecord>,
    pub files: Vec<FileRecord>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, desk_scale: bool) -> Self {
        Self {
            tool: "ranklab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            desk_scale,
            stages: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn record_written(&mut self, stage: &str, artifacts: Vec<String>) {
        self.stages.push(StageRecord {
            stage: stage.into(),
            status: StageStatus::Written,
            artifacts,
        });
    }

    pub fn record_skipped(&mut self, stage: &str, reason: &str) {
        self.stages.push(StageRecord {
            stage: stage.into(),
            status: StageStatus::Skipped { reason: reason.into() },
            artifacts: Vec::new(),
        });
    }

    pub fn record_failed(&mut self, stage: &str, error: &str) {
        self.stages.push(StageRecord {
            stage: stage.into(),
            status: StageStatus::Failed { error: error.into() },
            artifacts: Vec::new(),
        });
    }

    /// Checksums every recorded artifact (relative to `out`) and writes
    /// `manifest.json`.
    pub fn finalize(mut self, out: &Path) -> anyhow::Result<PathBuf> {
        let mut names: Vec<String> = self
            .stages
            .iter()
            .flat_map(|s| s.artifacts.iter().cloned())
            .collect();
        names.sort();
        names.dedup();
        for name in names {
            let path = out.join(&name);
            let bytes = std::fs::read(&path)?;
            let mut hasher = Sha256::new();
            hasher.update(&bytes);
            self.files.push(FileRecord { path: name, sha256: format!("{:x}", hasher.finalize()) });
        }
        let json = serde_json::to_string_pretty(&self)?;
        let path = out.join("manifest.json");
        write_atomic(&path, &json)?;
        Ok(path)
    }
}

/// Writes one artifact and returns its manifest name.
pub fn emit(out: &Path, name: &str, contents: &str) -> anyhow::Result<String> {
    write_atomic(&out.join(name), contents)?;
    Ok(name.to_string())
}
