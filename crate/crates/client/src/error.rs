use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("invalid endpoint configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Precondition(&'static str),

    #[error("request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },

    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },

    #[error("judge reply has no 0/1 score: {reply:?}")]
    JudgeFormat { reply: String },

    #[error("unexpected response shape: {0}")]
    Schema(String),

    #[error("score cache {path}: {source}")]
    Cache {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ClientError {
    pub fn kind(&self) -> &'static str {
        match self {
            ClientError::Config(_) => "config",
            ClientError::Precondition(_) => "precondition",
            ClientError::Transport { .. } => "transport",
            ClientError::Status { .. } => "http_status",
            ClientError::JudgeFormat { .. } => "judge_format",
            ClientError::Schema(_) => "schema",
            ClientError::Cache { .. } => "cache",
        }
    }

    pub(crate) fn retryable(&self) -> bool {
        match self {
            ClientError::Transport { .. } => true,
            ClientError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}
