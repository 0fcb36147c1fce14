pub mod data;
pub mod judge;
pub mod lingfeat;
pub mod matrix;
pub mod report;
pub mod similarity;

use std::path::PathBuf;

use crate::error::{CliError, Result};

/// Parses `NAME=PATH`.
pub fn named_path(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((n, p)) if !n.is_empty() && !p.is_empty() => Ok((n.to_string(), PathBuf::from(p))),
        _ => Err(format!("expected NAME=PATH, got {s:?}")),
    }
}

/// Runs `fut` on a fresh multi-threaded runtime.
pub fn block_on<F: std::future::Future>(fut: F) -> Result<F::Output> {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Config(format!("cannot start async runtime: {e}")))?;
    Ok(rt.block_on(fut))
}
