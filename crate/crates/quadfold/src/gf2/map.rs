use super::bits::BitMat;
use crate::{Error, Result};

/// A linear map from `m x m` matrices to `r x r` matrices.
///
/// The conjugation form `a -> rho a rho^T` preserves symmetry automatically.
/// A general form (an `r^2 x m^2` matrix acting on the flattened input) is
/// accepted on input, but its symmetric-preservation is verified up front and
/// violation is a hard error: the Fourier-side decoding silently breaks on
/// maps that do not send symmetric matrices to symmetric matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixMap {
    Conjugation { rho: BitMat },
    General { m: usize, r: usize, rows: Vec<u64> },
}

impl MatrixMap {
    pub fn conjugation(rho: BitMat) -> Self {
        MatrixMap::Conjugation { rho }
    }

    /// Build a general-form map, rejecting maps that break the symmetric
    /// subspace. `rows` holds `r^2` functionals over `m^2` flattened bits.
    pub fn general(m: usize, r: usize, rows: Vec<u64>) -> Result<Self> {
        if rows.len() != r * r {
            return Err(Error::InvalidParameter(format!(
                "general map needs {} rows, got {}",
                r * r,
                rows.len()
            )));
        }
        let map = MatrixMap::General { m, r, rows };
        if !map.preserves_symmetric() {
            return Err(Error::Invariant(
                "matrix-space map does not send symmetric matrices to symmetric matrices".into(),
            ));
        }
        Ok(map)
    }

    pub fn input_dim(&self) -> usize {
        match self {
            MatrixMap::Conjugation { rho } => rho.cols(),
            MatrixMap::General { m, .. } => *m,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            MatrixMap::Conjugation { rho } => rho.rows(),
            MatrixMap::General { r, .. } => *r,
        }
    }

    /// Apply the map: `pi(a)`.
    pub fn apply(&self, a: &BitMat) -> BitMat {
        let m = self.input_dim();
        assert_eq!((a.rows(), a.cols()), (m, m), "shape mismatch");
        match self {
            MatrixMap::Conjugation { rho } => rho.mul(a).mul(&rho.transpose()),
            MatrixMap::General { r, rows, .. } => {
                let mut out = BitMat::zero(*r, *r);
                for (k, &row) in rows.iter().enumerate() {
                    let bit = ((row & a.flat_bits()).count_ones() & 1) as u8;
                    out.set(k / r, k % r, bit);
                }
                out
            }
        }
    }

    /// The adjoint: the unique `m x m` matrix `Z` with `<Z, Y> = <X, pi(Y)>`
    /// for every `Y`. For the conjugation form this is `rho^T X rho`.
    pub fn adjoint_apply(&self, x: &BitMat) -> BitMat {
        let r = self.output_dim();
        assert_eq!((x.rows(), x.cols()), (r, r), "shape mismatch");
        match self {
            MatrixMap::Conjugation { rho } => rho.transpose().mul(x).mul(rho),
            MatrixMap::General { m, r, rows } => {
                let mut out = BitMat::zero(*m, *m);
                for (k, &row) in rows.iter().enumerate() {
                    if x.get(k / r, k % r) == 1 {
                        out = out + BitMat::from_flat(*m, *m, row);
                    }
                }
                out
            }
        }
    }

    /// Check `pi(S)` is symmetric for a basis of the symmetric subspace.
    pub fn preserves_symmetric(&self) -> bool {
        let m = self.input_dim();
        symmetric_basis(m).iter().all(|s| self.apply(s).is_symmetric())
    }

    /// The map as `r^2` functionals over `m^2` flattened bits, row-major.
    pub fn as_rows(&self) -> Vec<u64> {
        let (m, r) = (self.input_dim(), self.output_dim());
        let mut rows = vec![0u64; r * r];
        for k in 0..m * m {
            let basis = BitMat::from_flat(m, m, 1 << k);
            let image = self.apply(&basis);
            for (out, row) in rows.iter_mut().enumerate() {
                if image.get(out / r, out % r) == 1 {
                    *row |= 1 << k;
                }
            }
        }
        rows
    }
}

/// Basis of the symmetric `m x m` matrices: `E_ii` and `E_ij + E_ji`.
pub fn symmetric_basis(m: usize) -> Vec<BitMat> {
    let mut basis = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        let mut e = BitMat::zero(m, m);
        e.set(i, i, 1);
        basis.push(e);
        for j in i + 1..m {
            let mut e = BitMat::zero(m, m);
            e.set(i, j, 1);
            e.set(j, i, 1);
            basis.push(e);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::mat_inner;
    use rand::{Rng, SeedableRng};

    #[test]
    fn adjoint_is_true_adjoint_exhaustively() {
        // <X ∘ pi, Y> = <X, pi(Y)> for all Y, m = r = 2 and a 3x2 case.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (r, m) in [(2usize, 2usize), (2, 3), (1, 3)] {
            for _ in 0..20 {
                let rho = BitMat::from_flat(r, m, rng.gen());
                let pi = MatrixMap::conjugation(rho);
                let x = BitMat::from_flat(r, r, rng.gen());
                let z = pi.adjoint_apply(&x);
                for yb in 0..1u64 << (m * m) {
                    let y = BitMat::from_flat(m, m, yb);
                    assert_eq!(mat_inner(&z, &y), mat_inner(&x, &pi.apply(&y)));
                }
            }
        }
    }

    #[test]
    fn adjoint_zero_and_identity() {
        let pi = MatrixMap::conjugation(BitMat::from_flat(2, 2, 0b0110));
        assert!(pi.adjoint_apply(&BitMat::zero(2, 2)).is_zero());
        let idm = MatrixMap::conjugation(BitMat::identity(3));
        let x = BitMat::from_flat(3, 3, 0b101_010_001);
        assert_eq!(idm.adjoint_apply(&x), x);
    }

    #[test]
    fn conjugation_preserves_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let r = rng.gen_range(1..=3);
            let m = rng.gen_range(r..=4);
            let rho = BitMat::from_flat(r, m, rng.gen());
            assert!(MatrixMap::conjugation(rho).preserves_symmetric());
        }
    }

    #[test]
    fn general_form_roundtrip_and_rejection() {
        let rho = BitMat::from_rows(&[vec![1, 0], vec![1, 1]]);
        let conj = MatrixMap::conjugation(rho);
        let general = MatrixMap::general(2, 2, conj.as_rows()).unwrap();
        for ab in 0..16u64 {
            let a = BitMat::from_flat(2, 2, ab);
            assert_eq!(general.apply(&a), conj.apply(&a));
            let x = BitMat::from_flat(2, 2, ab);
            assert_eq!(general.adjoint_apply(&x), conj.adjoint_apply(&x));
        }

        // E_01 -> E_01 (and nothing else) maps the symmetric E_01 + E_10 to
        // the asymmetric E_01: must be rejected.
        let mut rows = vec![0u64; 4];
        rows[1] = 0b0010;
        assert!(matches!(MatrixMap::general(2, 2, rows), Err(Error::Invariant(_))));
    }
}
