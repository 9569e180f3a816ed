use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("density grids differ: {0}")]
    GridMismatch(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("unknown catalog function `{0}`")]
    UnknownFunction(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("grid does not match the function domain: {0}")]
    DomainMismatch(String),
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid tau: {0}")]
    InvalidTau(String),
    #[error("tau too large: {0}")]
    TauTooLarge(String),
    #[error("spectrum under-resolved: {0}")]
    UnderResolved(String),
    #[error("omega grid size must be odd, got {0}")]
    EvenOmegaCount(usize),
    #[error("inverse transform left imaginary mass {0:e}")]
    ExcessImaginary(f64),
    #[error("degenerate query: {0}")]
    DegenerateQuery(String),
    #[error("probe grid too coarse: {0}")]
    ProbeTooCoarse(String),
    #[error("everywhere-degenerate: {0}")]
    EverywhereDegenerate(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("invalid benchmark: {0}")]
    InvalidBenchmark(String),
    #[error("invalid input {path}: {message}")]
    InvalidInput { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed CSV: {message}")]
    Csv { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Csv {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// True for failures reading or writing files, as opposed to numerical
    /// or domain failures.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Csv { .. })
    }
}
