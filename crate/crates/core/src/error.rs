use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A tensor product or n-copy construction would exceed the dimension budget.
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Eigensolver or linear-system breakdown.
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("map is not completely positive (most negative Choi eigenvalue {min_eigenvalue:.3e})")]
    CpViolation { min_eigenvalue: f64 },

    #[error("map is not trace preserving (deviation {deviation:.3e})")]
    TpViolation { deviation: f64 },

    /// Malformed JSON or channel specification text.
    #[error("parse error: {0}")]
    Parse(String),

    /// A bound formula evaluated outside the region where it was derived.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
