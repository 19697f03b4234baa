use thiserror::Error;

/// Failure modes shared by every construction in the crate.
///
/// `TruncationOverflow` is never a stand-in for a mathematical zero: it means
/// the exact answer exists but leaves the finite window being inspected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),
    #[error("level zero: {0}")]
    LevelZero(String),
    #[error("orbit is not admissible: {0}")]
    NotAdmissible(String),
    #[error("module is not diagonal: {0}")]
    NotDiagonal(String),
    #[error("probe inconclusive: {0}")]
    ProbeInconclusive(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
