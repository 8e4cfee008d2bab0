use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CsvTable;
use crate::error::{Error, Result};

/// A named output file held in memory until emission.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn csv(name: impl Into<String>, table: &CsvTable) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            bytes: table.to_bytes()?,
        })
    }

    pub fn json<T: Serialize>(name: impl Into<String>, value: &T) -> Result<Self> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        Ok(Self {
            name: name.into(),
            bytes,
        })
    }
}

/// Summary of one run. Holds no timestamps so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub version: String,
    pub seed: Option<u64>,
    /// Effective configuration after overrides.
    pub config: serde_json::Value,
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(kind: impl Into<String>, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            kind: kind.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            metrics: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    pub fn new(report: Report) -> Self {
        Self {
            report,
            artifacts: Vec::new(),
        }
    }

    pub fn add(&mut self, artifact: Artifact) {
        self.report.artifacts.push(artifact.name.clone());
        self.artifacts.push(artifact);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(&target).map_err(|e| Error::io(&target, e.error))?;
    Ok(())
}

/// Emits every artifact, then `report.json`, then `manifest.json` listing
/// all of them. Returns the manifest path.
pub fn emit(dir: &Path, output: &RunOutput) -> Result<(std::path::PathBuf, Manifest)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let report = Artifact::json("report.json", &output.report)?;
    let mut files = Vec::new();
    for a in output.artifacts.iter().chain(std::iter::once(&report)) {
        if a.name.contains(['/', '\\']) || a.name == "manifest.json" {
            return Err(Error::param("artifact", format!("invalid file name `{}`", a.name)));
        }
        write_atomic(dir, &a.name, &a.bytes)?;
        files.push(ManifestEntry {
            name: a.name.clone(),
            bytes: a.bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(&a.bytes)),
        });
    }
    let manifest = Manifest { files };
    let bytes = Artifact::json("manifest.json", &manifest)?.bytes;
    write_atomic(dir, "manifest.json", &bytes)?;
    Ok((dir.join("manifest.json"), manifest))
}
