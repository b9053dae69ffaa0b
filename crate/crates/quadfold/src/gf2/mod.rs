//! Exact linear algebra over GF(2): bit-packed vectors and matrices, row
//! reduction, subspaces with canonical coset representatives, and linear maps
//! between matrix spaces.
//!
//! Matrices are flattened row-major when treated as vectors: entry `(i, j)`
//! of an `r x c` matrix is bit `i*c + j` of the flattened word. Every piece
//! of subspace code operates on that flattened form, so one embedding serves
//! the whole crate.

mod bits;
mod map;
mod subspace;

pub use bits::{mat_inner, outer_product, BitMat, BitVec};
pub use map::{symmetric_basis, MatrixMap};
pub use subspace::{kernel, solve_affine, Subspace};
