use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("time step {t} is outside the analysis range [{first}, {last}]")]
    OutOfRange { t: usize, first: usize, last: usize },

    #[error("insufficient data: t_max = {t_max} but window k = {k} needs at least {} steps", k + 1)]
    InsufficientData { t_max: usize, k: usize },

    #[error("invalid window length k = {0}: must be at least 2")]
    InvalidWindow(usize),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("duplicate parameter id `{0}`")]
    DuplicateParameter(String),

    #[error("length mismatch for `{id}`: expected {expected} values, got {actual}")]
    LengthMismatch { id: String, expected: usize, actual: usize },

    #[error("non-finite value for parameter `{parameter}` at t = {t}")]
    NonFinite { parameter: String, t: usize },

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("empty dataset")]
    EmptyData,

    #[error("invalid report: {0}")]
    InvalidReport(String),

    #[error("series ranges differ: [{a_first}, {a_last}] vs [{b_first}, {b_last}]")]
    RangeMismatch {
        a_first: usize,
        a_last: usize,
        b_first: usize,
        b_last: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
