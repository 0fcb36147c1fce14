//! Optional run configuration file (`--config`).
//!
//! Relative paths inside the file resolve against the file's directory.
//! Command-line flags take precedence over file values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use xfer_client::EndpointConfig;

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub pca_threshold: Option<f64>,
    pub ks_threshold: Option<f64>,
    pub tv_threshold: Option<f64>,
    pub aliases: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    /// Chat endpoint for `judge`.
    pub judge: Option<EndpointConfig>,
    /// Embedding endpoint for `similarity --texts`.
    pub embeddings: Option<EndpointConfig>,
    pub judge_cache: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.aliases, &mut cfg.lexicons, &mut cfg.judge_cache].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        for p in [&cfg.aliases, &cfg.lexicons].into_iter().flatten() {
            if !p.exists() {
                return Err(CliError::Config(format!("{}: referenced path {} does not exist", path.display(), p.display())));
            }
        }
        Ok(cfg)
    }
}
