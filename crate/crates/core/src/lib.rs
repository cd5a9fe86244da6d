//! Unextendible entanglement of quantum channels.
//!
//! Dense Choi-operator calculus, geometric Rényi divergences, k-extendibility
//! feasibility tests and the semidefinite programs that compute the
//! α-geometric unextendible entanglement for α = 1 + 2^{-ℓ}.

// The BLAS/LAPACK backend for the conic solver is linked through this crate.
extern crate openblas_src;

pub mod divergence;
pub mod error;
pub mod extend;
pub mod linalg;
pub mod oracle;
pub mod quantum;
pub mod sdp;

pub use error::{Error, Result};
pub use linalg::{HermitianMatrix, LabeledOperator, SubsystemShape, C64, CMatrix};
