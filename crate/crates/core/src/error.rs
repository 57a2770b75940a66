use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{line}: malformed record: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("referential error: {0}")]
    Referential(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("infeasible assignment: {0}")]
    Infeasible(String),

    #[error("rank-deficient design; collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("sample size {n} too small for {params} parameters")]
    SampleSize { n: usize, params: usize },

    #[error("no analyzable data: {0}")]
    NoData(String),

    #[error("invalid override for {submission_id}/{reviewer_id}: {reason}")]
    Override {
        submission_id: String,
        reviewer_id: String,
        reason: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable short identifier used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Referential(_) => "referential",
            Error::Validation(_) => "validation",
            Error::Infeasible(_) => "infeasible",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::SampleSize { .. } => "sample_size",
            Error::NoData(_) => "no_data",
            Error::Override { .. } => "override",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

/// Non-fatal condition surfaced alongside a result.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Warning {
    pub context: String,
    pub message: String,
}

impl Warning {
    pub fn new(context: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            context: context.into(),
            message: message.into(),
        }
    }
}
