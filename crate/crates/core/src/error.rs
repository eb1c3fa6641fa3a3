use thiserror::Error;

/// Errors raised by the numerical routines and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds tolerance {tol:e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("optimizer did not reach a stationary point from any of {starts} starts")]
    OptimizerNoConvergence { starts: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("Kraus operator {operator} is not incoherent (column {column})")]
    NotIncoherent { operator: usize, column: usize },

    #[error("unsupported subsystem dimensions {d_s}x{d_a}")]
    UnsupportedDims { d_s: usize, d_a: usize },

    #[error("relative entropy certificate failed: gap {gap:e}")]
    CertificationFailed { gap: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
