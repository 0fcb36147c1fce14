use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input at a 1-based line (and, for tables, column).
    #[error("parse error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("need at least 2 rows, got {rows}")]
    InsufficientRows { rows: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("eigen solver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("lookup error: {0}")]
    Lookup(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("interpolation index undefined: base and training medians are both {median}")]
    UndefinedIndex { median: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate embedding set {0}: centroid has zero norm")]
    DegenerateEmbedding(String),

    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column: None,
            message: message.into(),
        }
    }

    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Schema(_) => "schema",
            Error::EmptyInput(_) => "empty_input",
            Error::InsufficientRows { .. } => "insufficient_rows",
            Error::Argument(_) => "argument",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Numeric(_) => "numeric",
            Error::Config(_) => "config",
            Error::Lookup(_) => "lookup",
            Error::Infeasible(_) => "infeasible",
            Error::UndefinedIndex { .. } => "undefined_index",
            Error::Unsupported(_) => "unsupported",
            Error::DegenerateEmbedding(_) => "degenerate_embedding",
            Error::Validation(_) => "validation",
        }
    }
}
