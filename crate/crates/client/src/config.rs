use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::ClientError;

/// Decoding temperature for every request. Not configurable.
pub const TEMPERATURE: f64 = 0.0;

pub const DEFAULT_BATCH_SIZE: usize = 1000;

fn default_max_in_flight() -> usize {
    4
}

fn default_retries() -> u32 {
    3
}

fn default_timeout() -> f64 {
    60.0
}

fn default_backoff_ms() -> u64 {
    250
}

fn default_batch_size() -> usize {
    DEFAULT_BATCH_SIZE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    /// Prefix for `/chat/completions` and `/embeddings`, e.g. `http://host:8000/v1`.
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the bearer token. The token itself is
    /// never accepted as a setting.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    /// Extra attempts after the first failure.
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    /// First retry delay; doubles on each further attempt.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            api_key_env: None,
            max_in_flight: default_max_in_flight(),
            retries: default_retries(),
            timeout_secs: default_timeout(),
            backoff_ms: default_backoff_ms(),
            batch_size: default_batch_size(),
        }
    }

    pub fn validate(&self) -> Result<(), ClientError> {
        if self.max_in_flight == 0 {
            return Err(ClientError::Config("max_in_flight must be at least 1".into()));
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return Err(ClientError::Config(format!("timeout_secs must be positive, got {}", self.timeout_secs)));
        }
        if self.batch_size == 0 {
            return Err(ClientError::Config("batch_size must be at least 1".into()));
        }
        if self.base_url.is_empty() || self.model.is_empty() {
            return Err(ClientError::Config("base_url and model are required".into()));
        }
        Ok(())
    }

    pub(crate) fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }

    pub(crate) fn url(&self, path: &str) -> String {
        format!("{}/{path}", self.base_url.trim_end_matches('/'))
    }

    /// Reads the token from the configured variable, if any.
    pub(crate) fn token(&self) -> Result<Option<String>, ClientError> {
        match &self.api_key_env {
            None => Ok(None),
            Some(var) => std::env::var(var)
                .map(Some)
                .map_err(|_| ClientError::Config(format!("environment variable {var} is not set"))),
        }
    }
}
