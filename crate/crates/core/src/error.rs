use thiserror::Error;

/// Errors raised by the curvature workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{context} requires dimension >= {required}, got {found}")]
    DimensionTooSmall {
        found: usize,
        required: usize,
        context: &'static str,
    },
    #[error("{context} requires dimension {required}, got {found}")]
    WrongDimension {
        found: usize,
        required: usize,
        context: &'static str,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("chart evaluation failed: {0}")]
    Chart(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub(crate) fn ensure_same(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}
