//! Dense Hermitian linear algebra and tensor-factor bookkeeping.

mod hermitian;
mod ops;
mod shape;

pub use hermitian::{
    herm_eig, hermitian_deviation, log2_on_support, map_on_support, mat_power_on_support, support_isometry,
    support_leakage, support_projector, support_rank, weighted_geometric_mean, CMatrix, HermEig, HermitianMatrix, C64,
    DEFAULT_HERM_TOL, DEFAULT_RANK_TOL, SUPPORT_TOL,
};
pub use ops::{
    embed_identity, partial_trace, partial_transpose, permutation_unitary, permute_subsystems, swap_subsystems,
    validate_permutation, LabeledOperator,
};
pub use shape::SubsystemShape;
