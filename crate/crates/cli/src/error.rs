use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;
use xfer_client::ClientError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] xfer::Error),

    #[error(transparent)]
    Client(#[from] ClientError),

    #[error("{0}")]
    Config(String),

    #[error("failed to read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Artifacts were written but some items failed.
    #[error("{0}")]
    Partial(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Client(e) => e.kind(),
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Partial(_) => "partial_failure",
        }
    }

    fn path(&self) -> Option<String> {
        match self {
            CliError::Io { path, .. } | CliError::Core(xfer::Error::Io { path, .. }) => {
                Some(path.display().to_string())
            }
            _ => None,
        }
    }

    pub fn to_json(&self, command: &str) -> serde_json::Value {
        let mut err = json!({
            "command": command,
            "kind": self.kind(),
            "message": self.to_string(),
        });
        if let Some(p) = self.path() {
            err["path"] = p.into();
        }
        json!({ "error": err })
    }
}
