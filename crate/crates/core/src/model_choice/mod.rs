//! Data-driven weights and their sequential testing.
//!
//! Every builder here looks only at the design-projected data `M` through
//! its sums of products `M'M`, which is what keeps the beta tests exact.

mod gene_sets;
mod ordering;
mod pca;
mod sequential;
mod weights;

pub use gene_sets::{
    build_gene_sets, candidate_set, column_sums_of_squares, finish_build, gene_set_weights, select_gene_sets,
    GeneSet, GeneSetBuild, GeneSetOptions, INCLUSION_THRESHOLD, TOP_CAP,
};
pub use ordering::{
    column_abs_sum, column_sum_order, column_sum_order_data, kropf_diagonal_order, kropf_diagonal_order_data,
    ordering_from_keys, OrderingKey, OrderingRule, VariableOrdering,
};
pub use pca::{pca_weights, pca_weights_from_sop, PcaWeights};
pub use sequential::{
    run_sequential, run_sequential_with, sequential_on_pvalues, Procedure, SequentialDecision,
    SequentialOutcome,
};
pub use weights::{fingerprint, Warning, WeightMatrix, WeightSource};
