use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |M - M^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("expectation has imaginary part {imag:.3e}")]
    ComplexExpectation { imag: f64 },

    #[error("negative variance {value:.3e} exceeds round-off clip")]
    NegativeVariance { value: f64 },

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error(
        "truncation guard: probability mass {mass:.3e} in top {levels} of {cutoff} levels exceeds {threshold:.0e}"
    )]
    TailMass {
        mass: f64,
        levels: usize,
        cutoff: usize,
        threshold: f64,
    },

    #[error("operation requires {expected}, got {found}")]
    WrongAlgebra { expected: &'static str, found: String },

    #[error("representation dimension {dim} exceeds cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("eigendecomposition residual {residual:.3e} exceeds tolerance")]
    EigenResidual { residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
