use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its allowed domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    /// Malformed or corrupt serialized data.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// The inverse problem carries no information to solve for.
    #[error("unsolvable problem: {0}")]
    Unsolvable(String),

    #[error("degenerate operator: {0}")]
    Degenerate(String),

    #[error("incomplete calibration, missing scene indices {0:?}")]
    IncompleteCalibration(Vec<usize>),

    #[error("unattainable target: {0}")]
    Unattainable(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
