use thiserror::Error;

use crate::quadrature::QuadError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    /// A spectral point sits exactly on a regime boundary where the tensor
    /// expressions have a pole; callers must approach it as a limit.
    #[error("spectral point on regime boundary: {0}")]
    Boundary(String),

    /// A reflection-coefficient denominator vanished. For a passive
    /// response this never happens, so it signals an internal inconsistency.
    #[error("singular reflection denominator: {0}")]
    Singular(String),

    #[error("quadrature budget exceeded: {detail}")]
    Budget { detail: String, evaluations: usize },

    #[error("quadrature failure: {0}")]
    Quadrature(String),
}

impl<T: std::fmt::Debug> From<QuadError<T>> for Error {
    fn from(err: QuadError<T>) -> Self {
        match err {
            QuadError::BudgetExceeded { ref best, .. } => {
                Error::Budget { evaluations: best.evaluations, detail: err.to_string() }
            }
            other => Error::Quadrature(other.to_string()),
        }
    }
}
