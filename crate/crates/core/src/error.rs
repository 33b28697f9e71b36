use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("reduction map is rank deficient (singular value ratio {0:e})")]
    RankDeficient(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("eigen-solver failure: {0}")]
    EigenSolver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
