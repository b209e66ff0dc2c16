//! Max-trace tuning of clustering hyperparameters.
//!
//! A clustering `Ẑ` with `r` clusters induces the normalized clustering
//! matrix `X = Z(ZᵀZ)⁻¹Zᵀ`. Given a similarity matrix `Ŝ` that is
//! block-structured under the true clustering, candidates are scored by the
//! trace `⟨Ŝ, X⟩` and the maximizer is selected ([`tuning::matr`]). For the
//! number of clusters, the score is computed on held-out nodes
//! ([`tuning::matr_cv`]).

// Index loops mirror the matrix formulas; negated comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod generators;
pub mod matrices;
pub mod metrics;
pub mod rng;
pub mod sdp;
pub mod similarity;
pub mod spacl;
pub mod tuning;

pub use error::{Error, Result};
pub use generators::{AdjacencyMatrix, HardMembership, Membership, SoftMembership};
pub use matrices::{Matrix, SymMatrix};
