use thiserror::Error;

/// Errors produced by parameter validation and the numerical solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A model parameter violates its domain. The message names the parameter.
    #[error("{0}")]
    InvalidParam(String),

    /// Gaussian elimination met a pivot below the singularity threshold.
    /// For stationary-distribution solves this means the chain is reducible.
    #[error("singular matrix: pivot {pivot:e} at column {column} below threshold {threshold:e}")]
    Singular {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    /// The quadrature range leaves too much survival mass uncovered.
    #[error("tail integral not converged: survival {tail:e} at upper limit {upper}")]
    NonConvergence { tail: f64, upper: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
