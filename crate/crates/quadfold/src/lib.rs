//! Exact, desk-scale machinery for quadratic-code verifier tests over GF(2)
//! and the hypergraph coloring reductions they induce.
//!
//! The crate builds label-cover instances whose labels are symmetric bit
//! matrices, folds proof functions over per-vertex constraint cosets, runs the
//! 8-query and 4-query not-all-equal tests on them, materializes the resulting
//! hypergraphs, and computes every step of the Fourier-side independence
//! analysis with exact rational arithmetic. Brute-force solvers provide
//! independent ground truth for the small hypergraphs this produces.

pub mod acceptance;
pub mod cli;
pub mod exact;
pub mod files;
pub mod folding;
pub mod gf2;
pub mod hypergraph;
pub mod label_cover;
pub mod oracle;
pub mod soundness;
pub mod verifier;

mod error;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
