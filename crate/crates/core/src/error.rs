use thiserror::Error;

use crate::sdp::SolveStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds tolerance {tol:.1e}")]
    NonHermitian { deviation: f64, tol: f64 },
    #[error("operator is not positive semidefinite: eigenvalue {min_eigenvalue:.3e}")]
    NegativeOperator { min_eigenvalue: f64 },
    #[error("support condition violated: {0}")]
    SupportViolation(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid probability {name} = {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid superchannel: {0}")]
    InvalidSuperchannel(String),
    #[error("invalid extension: {0}")]
    InvalidExtension(String),
    #[error("solver failure ({status:?}): {message}")]
    SolverFailure { status: SolveStatus, message: String },
    #[error("infeasible model: {0}")]
    InfeasibleModel(String),
    #[error("problem too large: {0}")]
    ProblemTooLarge(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
