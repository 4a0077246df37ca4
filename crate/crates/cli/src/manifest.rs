//! Run manifests: enough metadata to reproduce any output bit-exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Name of a file plus the SHA-256 of its bytes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Record of one command invocation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// The argv that produced this run.
    pub command: Vec<String>,
    /// Effective configuration after defaults and flag overrides.
    pub config: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    /// Input files as given on the command line.
    pub inputs: Vec<FileDigest>,
    /// Output files, named relative to the output directory.
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes =
        std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Collects manifest state while a command runs, then writes
/// `manifest.json` into the output directory.
pub struct ManifestBuilder {
    manifest: RunManifest,
    out_dir: PathBuf,
}

impl ManifestBuilder {
    pub fn new(command: &[String], out_dir: &Path) -> Self {
        Self {
            manifest: RunManifest {
                tool: "reslife".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.to_vec(),
                config: BTreeMap::new(),
                seeds: Vec::new(),
                inputs: Vec::new(),
                outputs: Vec::new(),
            },
            out_dir: out_dir.to_path_buf(),
        }
    }

    pub fn config(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.manifest.config.insert(key.into(), value.to_string());
        self
    }

    pub fn config_map(&mut self, map: &BTreeMap<String, String>) -> &mut Self {
        self.manifest.config.extend(map.clone());
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.manifest.seeds.push(seed);
        self
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        self.manifest.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(path)?,
        });
        Ok(self)
    }

    /// Registers a file previously written into the output directory.
    pub fn output(&mut self, name: &str) -> Result<&mut Self> {
        self.manifest.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(&self.out_dir.join(name))?,
        });
        Ok(self)
    }

    pub fn write(&self) -> Result<PathBuf> {
        let path = self.out_dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(&path, json + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}
