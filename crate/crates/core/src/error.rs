use thiserror::Error;

/// Errors produced by channel construction, conversion and spoofing routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix of size {rows}x{cols} is not d^2 x d^2 for an integer d")]
    NotPerfectSquare { rows: usize, cols: usize },

    #[error("a Kraus set needs at least one operator")]
    EmptyKrausSet,

    #[error("Kraus operators are not trace preserving: |sum K^dag K - I| = {deviation:e}")]
    NotTracePreserving { deviation: f64 },

    #[error("matrix is not a density matrix: {reason}")]
    InvalidDensity { reason: String },

    #[error("input is not completely positive: eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    NotCompletelyPositive { min_eigenvalue: f64, tol: f64 },

    #[error("Choi matrix is not CPTP within {tol:e}: {report}")]
    NotCptp { tol: f64, report: String },

    #[error("invalid Kraus rank {rank} for dimension {dim} (must be in 1..={max})", max = dim * dim)]
    InvalidRank { rank: usize, dim: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("invalid gauge core: {0}")]
    InvalidGaugeCore(String),

    #[error("candidate member is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    PsdViolation { min_eigenvalue: f64 },

    #[error("off-diagonal block ({row}, {col}) has trace of modulus {modulus:e} in paper-strict mode")]
    TracelessViolation { row: usize, col: usize, modulus: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("gauge parameter {0} outside [-1, 1]")]
    GaugeOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigendecomposition failed to converge")]
    Eigen,

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
