use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::RunError;

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Everything needed to reproduce a run, written next to its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub software_version: String,
    pub gamma: f64,
    pub grid: usize,
    pub jnd_cents: f64,
    pub n_cut: usize,
    pub n_modes: usize,
    pub f0_hz: f64,
    /// All flags as parsed, defaults included.
    pub flags: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_ordering: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<String>,
    pub diagnostics: BTreeMap<String, f64>,
    pub outputs: Vec<OutputRecord>,
}

/// Collects output files into one directory and records their hashes.
pub struct OutputSet {
    dir: PathBuf,
    records: Vec<OutputRecord>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            records: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| RunError::io(&path, e))?;
        self.records.push(OutputRecord {
            file: name.to_string(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<RunManifest, RunError> {
        manifest.outputs = self.records;
        let name = format!("{}-manifest.json", manifest.command);
        let path = self.dir.join(&name);
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| RunError::Internal(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| RunError::io(&path, e))?;
        Ok(manifest)
    }
}
