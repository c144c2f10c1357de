use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: at least {min} Fock levels are required")]
    InvalidDim { dim: usize, min: usize },

    #[error("truncation too small: tail mass {tail:.3e} beyond level {dim} exceeds tolerance {tol:.1e}")]
    TruncationTooSmall { dim: usize, tail: f64, tol: f64 },

    #[error("invalid cat state: {0}")]
    InvalidCat(String),

    #[error("mixture weights must be non-negative and sum to 1 (sum = {sum})")]
    WeightMismatch { sum: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("population {population:.3e} on the top two Fock levels exceeds tolerance {tol:.1e}")]
    TailLeak { population: f64, tol: f64 },

    #[error("invalid evolution parameter: {0}")]
    InvalidParams(String),

    #[error("invalid state: {0}")]
    InvalidState(String),
}
