//! Quantum entanglement of tensors, locally connected tree tensor networks, and feature
//! rearrangement that makes data easier for locally connected models.
//!
//! Indices are 0-based throughout. Entropies are in nats.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod io;
pub mod linalg;
pub mod partitions;
pub mod rearrange;
pub mod surrogate;
pub mod synth;
pub mod tensor;
pub mod tree_tn;

pub use data::{
    average_canonical_entanglement, canonical_entanglements, empirical_data_tensor_dense,
    entanglement, entanglement_gram, sample_size_bound, suboptimality_upper_bound, Dataset,
    DEFAULT_THETA,
};
pub use error::{Error, Result};
pub use partitions::{canonical_partitions, CanonicalPartition, CompatibleMap};
pub use rearrange::{
    apply_permutation, average_canonical_surrogate, min_balanced_cut, min_balanced_pow2_cut,
    permute_graph, random_swaps, rearrange_1d, rearrange_pdim, CutMode, CutOptions, CutSolution,
    FeaturePermutation,
};
pub use surrogate::{
    build_correlation_graph, multivariate_pearson, surrogate_entanglement, CorrelationGraph,
};
pub use tensor::{AxisPartition, DenseTensor};
pub use tree_tn::{
    check_necessary_bound_all, fit_hierarchical, random_ttn, HierarchicalFit, TreeTensorNetwork,
};
