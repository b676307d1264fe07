use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ForgeError, Result};
use crate::jsonl;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Sidecar record of one stage run. Everything except `duration_ms` is a
/// deterministic function of the inputs and configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineManifest {
    pub stage: String,
    pub config_hash: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub records_in: usize,
    pub records_out: usize,
    pub seed: u64,
    pub tool_version: String,
    #[serde(default)]
    pub details: BTreeMap<String, Value>,
    pub duration_ms: u64,
}

impl PipelineManifest {
    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    /// Filtering stages never grow their input.
    pub fn check_filtering(&self) -> Result<()> {
        if self.records_out > self.records_in {
            return Err(ForgeError::Invariant(format!(
                "{} produced {} records from {}",
                self.stage, self.records_out, self.records_in
            )));
        }
        Ok(())
    }

    /// Same manifest with the wall-clock field zeroed, for comparisons.
    pub fn without_timing(&self) -> Self {
        PipelineManifest {
            duration_ms: 0,
            ..self.clone()
        }
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

pub fn write_manifest(output: &Path, manifest: &PipelineManifest) -> Result<()> {
    jsonl::write_json(&manifest_path(output), manifest)
}

pub fn read_manifest(output: &Path) -> Result<PipelineManifest> {
    let path = manifest_path(output);
    let text = std::fs::read_to_string(&path).map_err(|e| ForgeError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| ForgeError::parse(&path, e.line(), e))
}
