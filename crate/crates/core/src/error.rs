use thiserror::Error;

/// Errors raised by the numerical kernels and the command layer.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are incompatible (matrix sizes, site dimensions, ...).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input violated an operation's precondition (e.g. non-Hermitian matrix
    /// passed to the Hermitian eigensolver).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Matrix has an eigenvalue below the negative PSD tolerance.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    /// Argument outside its admissible range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Ensemble or run configuration cannot be honoured.
    #[error("configuration error: {0}")]
    Config(String),

    /// Value outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested feature is not available for the given input (e.g. quadrature
    /// for generator sets other than three generators).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
