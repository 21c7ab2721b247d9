use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the command line to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{line}: {msg}")]
    Parse { file: PathBuf, line: usize, msg: String },

    #[error("{file}: sample too short ({len} readings, need at least {min})")]
    TooShort { file: PathBuf, len: usize, min: usize },

    #[error("{file}:{line}: duplicate sample identity {identity}")]
    Duplicate { file: PathBuf, line: usize, identity: String },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("feature order version mismatch: model has {model}, runtime has {runtime}")]
    VersionMismatch { model: u32, runtime: u32 },

    #[error("corrupt model file {path}: {msg}")]
    CorruptModel { path: PathBuf, msg: String },

    #[error("{} sample(s) failed, first: {}", .0.len(), .0[0])]
    Aggregate(Vec<Error>),

    #[error("sample {identity}: {source}")]
    Sample {
        identity: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(file: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { file: file.into(), line, msg: msg.into() }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_) | Error::Config(_) => ErrorKind::Usage,
            Error::LengthMismatch { .. } | Error::Singular(_) => ErrorKind::Numeric,
            Error::Sample { source, .. } => source.kind(),
            Error::Aggregate(errors) => errors.first().map(Error::kind).unwrap_or(ErrorKind::Data),
            _ => ErrorKind::Data,
        }
    }
}
