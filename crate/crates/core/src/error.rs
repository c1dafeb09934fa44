use std::path::PathBuf;

/// Errors produced by the simulation, learning and harness layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("cannot step a terminal state (step {step} of {n_steps})")]
    TerminalStep { step: usize, n_steps: usize },

    #[error("empty sample")]
    Empty,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("runs were evaluated on different path sets: {0}")]
    MismatchedEval(String),

    #[error("unsupported snapshot: {0}")]
    Snapshot(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Shape { .. } => "shape",
            Error::TerminalStep { .. } => "terminal_step",
            Error::Empty => "empty",
            Error::NotPositiveDefinite => "not_positive_definite",
            Error::MismatchedEval(_) => "mismatched_eval",
            Error::Snapshot(_) => "snapshot",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
