use thiserror::Error;

/// Errors raised by rule construction, assembly and solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Two points that must be distinct coincide (e.g. a node and a collocation point).
    #[error("degenerate geometry: {0}")]
    GeometryDegenerate(String),

    /// The Cauchy denominator vanishes, so the evaluation point is probably not interior.
    #[error("degenerate evaluation point: {0}")]
    LocationDegenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
