use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e} below cutoff)")]
    NotPositive { min_eigenvalue: f64 },
    #[error("weight operator is zero; a nonzero positive operator is required")]
    ZeroOperator,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("operator does not map the null space of A into itself")]
    NotABounded,
    #[error("operator has no A-adjoint (range of T*A is not contained in range of A)")]
    NotAAdjointable,
    #[error("a second operator is required for this functional")]
    MissingOperand,
    #[error("at least one sample is required")]
    NoSamples,
    #[error("invalid problem file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
