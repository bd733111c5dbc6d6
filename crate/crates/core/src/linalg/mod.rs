//! Dense matrix primitives.

mod data;
mod eigen;
mod matrix;
mod projection;

pub use data::{
    center, residual_sums_of_products, sums_of_products, CenteredMatrix, DataMatrix, SopKind,
    SumsOfProducts,
};
pub use eigen::{
    distance_up_to_sign, dual_eigen_scores, dual_primal_gap, fix_sign, full_symmetric_eigen,
    numerical_rank, primal_from_dual, residual_norm, symmetric_eigen, DualEigen, EigenPair,
    RANK_TOLERANCE, TIE_TOLERANCE,
};
pub use matrix::{axpy, dot, max_abs, norm2, Matrix};
pub use projection::{
    make_design_projections, projection_onto, Design, DesignKind, GroupLabels, ProjectionPair,
    TargetVector, PROJECTION_TOLERANCE,
};
