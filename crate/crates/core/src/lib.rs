//! Estimating the full eigenvalue spectrum of a large symmetric matrix from
//! small random principal submatrices.
//!
//! The building blocks are:
//!
//! * [`matrix`] and [`eigen`]: dense symmetric matrices, an exact
//!   eigensolver used on the sampled submatrices (and as the reference),
//!   and spectrum distance metrics.
//! * [`store`]: sparse symmetric storage with row aggregates for
//!   sparsity- and norm-proportional sampling.
//! * [`samplers`]: uniform, sparsity-weighted and norm-weighted submatrix
//!   sampling with their zeroing rules, entrywise sparsification, and
//!   independent row/column sampling.
//! * [`estimators`]: turns sampled submatrices into length-`n` spectrum
//!   estimates, plus median boosting.
//! * [`generators`] and [`io`]: test matrix families and file loaders.
//! * [`harness`]: the experiment runner behind the command-line tool.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod estimators;
pub mod exec;
mod fenwick;
pub mod generators;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod rng;
pub mod samplers;
pub mod store;

pub use eigen::{sym_eig, sym_eigvals, DEFAULT_TOL};
pub use error::{Error, Result};
pub use estimators::{
    align_estimates, estimate_entrywise_pipeline, estimate_norm, estimate_nnz, estimate_psd,
    estimate_singular, estimate_uniform, median_boost, EstimateReport, SamplerKind,
};
pub use exec::Execution;
pub use matrix::{linf_spectrum_error, spectral_norm, wasserstein1, weyl_gap, Spectrum, SymMatrix};
pub use samplers::{NnzZeroing, NormZeroing};
pub use store::{RowWeight, SparseSymStore};
