use thiserror::Error;

/// Errors raised by grid construction, sampling and norm evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("aliasing: {0}")]
    Aliasing(String),
    #[error("window truncation: {0}")]
    WindowTruncation(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of the numerics (NaN, aliasing) rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite(_) | Error::Aliasing(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
