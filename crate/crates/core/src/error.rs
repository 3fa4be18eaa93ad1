use thiserror::Error;

/// Errors shared by all numeric modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max symmetry violation {violation:.3e})")]
    NotHermitian { violation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositive { eigenvalue: f64 },

    #[error("trace is {trace}, expected 1 within tolerance")]
    TraceNotOne { trace: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("eigensolver did not converge (off-diagonal mass {off:.3e})")]
    EigenConvergence { off: f64 },

    #[error("optimizer did not converge (best value {best}, simplex spread {spread:.3e})")]
    OptimizerConvergence { best: f64, spread: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
