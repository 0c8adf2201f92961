use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value {what} at node {node:?}")]
    NonFinite { what: String, node: Vec<f64> },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(
        "stability condition violated: tau = {tau} exceeds tau_max = {tau_max} \
         (pass allow_unstable to override)"
    )]
    Unstable { tau: f64, tau_max: f64 },

    #[error("singular 2x2 mode matrix at mode {mode:?} (|det| = {det})")]
    SingularMode { mode: Vec<i64>, det: f64 },

    #[error("implicit solve did not converge in {iterations} iterations (residuals: {residuals:?})")]
    NoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("reference norm is zero")]
    ZeroReference,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
