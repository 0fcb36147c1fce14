//! Artifact writing and the per-run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::artifact::Artifact;
use crate::error::{CliError, Result};

#[derive(Debug, Serialize)]
struct FileEntry {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    parameters: &'a BTreeMap<String, Value>,
    inputs: &'a [FileEntry],
    outputs: &'a [FileEntry],
}

/// Collects inputs, parameters and outputs of one subcommand run. Outputs are
/// written immediately; `finish` writes `manifest.json` last.
pub struct Run {
    command: &'static str,
    out_dir: PathBuf,
    params: BTreeMap<String, Value>,
    inputs: Vec<FileEntry>,
    outputs: Vec<FileEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run {
    pub fn new(command: &'static str, out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
        Ok(Self {
            command,
            out_dir: out_dir.to_path_buf(),
            params: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    /// Records an input file, failing early if it cannot be read.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(FileEntry { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        Ok(())
    }

    /// Records every regular file directly inside `dir`, in name order.
    pub fn input_dir(&mut self, dir: &Path) -> Result<()> {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| CliError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        paths.sort();
        paths.iter().try_for_each(|p| self.input(p))
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("parameters serialize");
        self.params.insert(key.to_string(), v);
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out_dir.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(FileEntry { path: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("artifacts serialize");
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, items: &[T]) -> Result<()> {
        let mut buf = Vec::new();
        xfer::io::write_jsonl_to(items, &mut buf).expect("writing to memory");
        self.write_bytes(name, &buf)
    }

    pub fn write_figures(&mut self, figures: Vec<(String, String)>) -> Result<()> {
        figures.into_iter().try_for_each(|(name, svg)| self.write_bytes(&name, svg.as_bytes()))
    }

    /// Writes the artifact JSON followed by its figures.
    pub fn write_artifact(&mut self, artifact: &Artifact) -> Result<()> {
        self.write_json(&artifact.file_name(), artifact)?;
        self.write_figures(artifact.figures()?)
    }

    pub fn finish(self) -> Result<()> {
        let manifest = Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            parameters: &self.params,
            inputs: &self.inputs,
            outputs: &self.outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.out_dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

/// Rounds to `decimals` places, removing float noise from differences of
/// fixed-precision inputs (61.48 − 52.08 prints as 9.4, not 9.399999999999999).
pub fn round_to(v: f64, decimals: u32) -> f64 {
    let f = 10f64.powi(decimals as i32);
    let r = (v * f).round() / f;
    if r == 0.0 { 0.0 } else { r }
}
