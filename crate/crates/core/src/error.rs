//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by state construction, linear algebra, and solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (wrong dims, domain violation,
    /// non-Hermitian input where a Hermitian one is required, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A dense object would exceed the configured entry cap.
    #[error("size cap exceeded: {needed} entries needed, cap is {cap}")]
    Size { needed: u128, cap: u128 },

    /// Exact integer arithmetic overflowed the register width.
    #[error("integer overflow: {0}")]
    Overflow(String),

    /// An iterative solver hit its iteration cap before reaching the
    /// requested tolerance. Carries the best feasible value found and the
    /// stationarity gap at the point the cap was hit.
    #[error("solver did not converge within {iterations} iterations (best value {best_value}, gap {gap})")]
    Convergence {
        best_value: f64,
        gap: f64,
        iterations: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
