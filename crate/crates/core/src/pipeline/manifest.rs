use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Record of one stage run. Paths inside the output directory are stored
/// relative to it; external inputs keep the path they were given by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Collects hashed inputs and outputs for one stage and writes its manifest.
pub(crate) struct StageRecorder {
    out: PathBuf,
    dir: PathBuf,
    stage: String,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl StageRecorder {
    /// `dir` is relative to the output root, e.g. `train/qnn32`.
    pub fn new(out: &Path, dir: &str, stage: &str) -> Result<Self> {
        let full = out.join(dir);
        fs::create_dir_all(&full).map_err(|e| Error::io(&full, e))?;
        Ok(Self {
            out: out.to_path_buf(),
            dir: PathBuf::from(dir),
            stage: stage.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        })
    }

    fn key(&self, path: &Path) -> String {
        path.strip_prefix(&self.out)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/")
    }

    /// Read a file and record its hash.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        self.inputs.insert(self.key(path), sha256_hex(&bytes));
        String::from_utf8(bytes)
            .map_err(|_| Error::invalid(format!("{} is not UTF-8", path.display())))
    }

    /// Path of an output-root file (for stages that read via library loaders).
    pub fn input_path(&self, rel: &str) -> PathBuf {
        self.out.join(rel)
    }

    /// Write a file under this stage's directory, then read it back and
    /// check its hash.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out.join(&self.dir).join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        let back = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let hash = sha256_hex(bytes);
        if sha256_hex(&back) != hash {
            return Err(Error::invalid(format!(
                "{} failed read-back check",
                path.display()
            )));
        }
        self.outputs.insert(self.key(&path), hash);
        Ok(())
    }

    pub fn finish(
        self,
        seed: u64,
        config: serde_json::Value,
        summary: serde_json::Value,
    ) -> Result<Manifest> {
        let m = Manifest {
            stage: self.stage,
            seed,
            config,
            inputs: self.inputs,
            outputs: self.outputs,
            summary,
        };
        let path = self.out.join(&self.dir).join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(&m)? + "\n";
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(m)
    }
}
