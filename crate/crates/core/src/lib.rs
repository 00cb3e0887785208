//! Numerical certification toolkit for a family of finite-rank averaging
//! operators built over dyadic index blocks.
//!
//! The construction lives on the coordinate space of sequences indexed by
//! `sigma_n = {2^n, ..., 2^{n+1} - 1}`: generating vectors `z_i` with six
//! dyadic entries, biorthogonal dual functionals in two window forms, the
//! per-level averaging operators `beta_n`, and their telescoping differences
//! expanded through nine fixed reindexing maps. Every combinatorial and
//! rational computation is exact; floating point enters only through an
//! internally verified SVD oracle and seeded randomized inequality sampling.
//!
//! What the crate certifies, level by level:
//!
//! - unit traces of the averaging operators in exact dyadic arithmetic;
//! - the flat singular spectrum of the averaging matrices (SVD oracle vs
//!   closed form), and the interpolation-based norm-decay bound chain;
//! - generation and independent re-verification of the block partitions
//!   (size bounds, distinctness, image-coherence under the reindexing maps)
//!   with a recorded minimum-block-size parameter;
//! - exact factorization certificates for the difference operators restricted
//!   to partition blocks, with randomized trace-cyclicity probes;
//! - the blockwise difference bounds `18 * card^(3/4)` against `36 / m^(1/4)`
//!   with running partial sums;
//! - seeded sampling of the coefficient-regrouping inequality (ratio <= 18).
//!
//! Reports are deterministic given (inputs, seed, version): reals rendered to
//! 15 significant digits, exact dyadics as `p/2^q`, partitions addressed by
//! SHA-256 digest.
//!
//! Module map: [`dyadic`] exact arithmetic and sparse vectors; [`index`] the
//! reindexing maps and difference vectors `y_j`; [`construction`] generating
//! vectors, duals, operators; [`linalg`]/[`svd`] the dense kernels and the
//! verified SVD; [`partition`] generation and certification of the block
//! partitions; [`normbounds`] the quantitative estimates and randomized
//! checks; [`enflo`] the orchestrated certification; [`report`] the report
//! documents.

pub mod construction;
pub mod dyadic;
pub mod enflo;
pub mod error;
pub mod index;
pub mod linalg;
pub mod normbounds;
pub mod partition;
pub mod report;
pub mod svd;

pub use error::{Error, Result};
