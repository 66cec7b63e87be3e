use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinslerError {
    /// Wrong shape, broken symmetry class, or an operation that does not
    /// apply to the given object.
    #[error("structural error: {0}")]
    Structural(String),
    /// A point or argument outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Ill-conditioning or a failed iteration.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The requested evaluation route is not available for this object.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, FinslerError>;

pub(crate) fn structural(msg: impl Into<String>) -> FinslerError {
    FinslerError::Structural(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> FinslerError {
    FinslerError::Domain(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> FinslerError {
    FinslerError::Numeric(msg.into())
}
