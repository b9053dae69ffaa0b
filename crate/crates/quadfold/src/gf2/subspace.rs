use super::bits::BitMat;

/// A subspace of GF(2)^n given by a reduced row-echelon basis.
///
/// Rows are stored sorted by pivot (lowest set bit) and fully reduced, so the
/// basis is a canonical function of the subspace. Coset representatives are
/// obtained by reduction against this basis, which zeroes every pivot
/// coordinate; the representatives are exactly the vectors supported on the
/// free coordinates and form a group under xor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<u64>,
}

impl Subspace {
    /// Span of the given vectors inside GF(2)^ambient.
    pub fn from_spanning(ambient: usize, vectors: impl IntoIterator<Item = u64>) -> Self {
        assert!((1..=64).contains(&ambient));
        let mask = mask_of(ambient);
        let mut basis: Vec<u64> = Vec::new();
        for mut v in vectors {
            v &= mask;
            for &b in &basis {
                let pivot = b.trailing_zeros();
                if (v >> pivot) & 1 == 1 {
                    v ^= b;
                }
            }
            if v != 0 {
                // Reduce existing rows against the new pivot, keep RREF.
                let pivot = v.trailing_zeros();
                for b in basis.iter_mut() {
                    if (*b >> pivot) & 1 == 1 {
                        *b ^= v;
                    }
                }
                basis.push(v);
            }
        }
        basis.sort_by_key(|b| b.trailing_zeros());
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace::from_spanning(ambient, std::iter::empty())
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::from_spanning(ambient, (0..ambient).map(|i| 1u64 << i))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    /// Canonical coset representative: reduce `x` by the RREF basis.
    pub fn coset_rep(&self, x: u64) -> u64 {
        let mut x = x & mask_of(self.ambient);
        for &b in &self.basis {
            let pivot = b.trailing_zeros();
            if (x >> pivot) & 1 == 1 {
                x ^= b;
            }
        }
        x
    }

    pub fn contains(&self, x: u64) -> bool {
        self.coset_rep(x) == 0
    }

    /// Pivot coordinates of the basis, ascending.
    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.trailing_zeros() as usize).collect()
    }

    /// Non-pivot coordinates, ascending. Coset representatives are supported
    /// exactly on these.
    pub fn free_coords(&self) -> Vec<usize> {
        let pivot_mask: u64 = self.basis.iter().fold(0, |m, b| m | (1 << b.trailing_zeros()));
        (0..self.ambient).filter(|&i| (pivot_mask >> i) & 1 == 0).collect()
    }

    /// All `2^dim` members. Intended for small dimensions.
    pub fn members(&self) -> Vec<u64> {
        assert!(self.dim() <= 24, "subspace too large to enumerate");
        let mut out = Vec::with_capacity(1 << self.dim());
        for sel in 0..1u64 << self.dim() {
            let mut v = 0;
            for (i, &b) in self.basis.iter().enumerate() {
                if (sel >> i) & 1 == 1 {
                    v ^= b;
                }
            }
            out.push(v);
        }
        out.sort_unstable();
        out
    }

    /// Orthogonal complement `{y : <y, x> = 0 for all x in self}`.
    pub fn dual(&self) -> Subspace {
        let kernel = kernel_of_rows(&self.basis, self.ambient);
        Subspace::from_spanning(self.ambient, kernel)
    }
}

fn mask_of(n: usize) -> u64 {
    if n == 64 { u64::MAX } else { (1 << n) - 1 }
}

/// Basis of `{x : rows * x = 0}` where each row is a functional over `cols` bits.
pub(crate) fn kernel_of_rows(rows: &[u64], cols: usize) -> Vec<u64> {
    // Forward elimination, recording pivot columns.
    let mut reduced: Vec<u64> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();
    for &row in rows {
        let mut r = row & mask_of(cols);
        for (&p, &b) in pivot_cols.iter().zip(&reduced) {
            if (r >> p) & 1 == 1 {
                r ^= b;
            }
        }
        if r != 0 {
            let p = r.trailing_zeros() as usize;
            for (b, _) in reduced.iter_mut().zip(&pivot_cols) {
                if (*b >> p) & 1 == 1 {
                    *b ^= r;
                }
            }
            reduced.push(r);
            pivot_cols.push(p);
        }
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = 1u64 << free;
        for (&p, &b) in pivot_cols.iter().zip(&reduced) {
            if (b >> free) & 1 == 1 {
                v |= 1 << p;
            }
        }
        basis.push(v);
    }
    basis
}

/// Kernel of a matrix: `{x : A x = 0}` as a subspace of GF(2)^cols.
pub fn kernel(a: &BitMat) -> Subspace {
    let rows: Vec<u64> = (0..a.rows()).map(|i| a.row_bits(i)).collect();
    Subspace::from_spanning(a.cols(), kernel_of_rows(&rows, a.cols()))
}

/// Solve the affine system `rows * x = rhs` over GF(2).
///
/// Returns `Some((particular, solution_space_dim))` when consistent, `None`
/// otherwise. `rhs` carries one bit per row.
pub fn solve_affine(rows: &[u64], rhs: u64, cols: usize) -> Option<(u64, usize)> {
    let mut reduced: Vec<(u64, u8)> = Vec::new();
    for (i, &row) in rows.iter().enumerate() {
        let mut r = row & mask_of(cols);
        let mut b = ((rhs >> i) & 1) as u8;
        for &(br, bb) in &reduced {
            let p = br.trailing_zeros();
            if (r >> p) & 1 == 1 {
                r ^= br;
                b ^= bb;
            }
        }
        if r == 0 {
            if b == 1 {
                return None;
            }
            continue;
        }
        let p = r.trailing_zeros();
        for (br, bb) in reduced.iter_mut() {
            if (*br >> p) & 1 == 1 {
                *br ^= r;
                *bb ^= b;
            }
        }
        reduced.push((r, b));
    }
    let mut particular = 0u64;
    for &(r, b) in &reduced {
        if b == 1 {
            particular |= 1 << r.trailing_zeros();
        }
    }
    Some((particular, cols - reduced.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMat;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&BitMat::identity(3)).dim(), 0);
        let full = kernel(&BitMat::zero(2, 2));
        assert_eq!(full.dim(), 2);
        let a = BitMat::from_rows(&[vec![1, 1], vec![0, 0]]);
        let k = kernel(&a);
        assert_eq!(k.dim(), 1);
        assert!(k.contains(0b11));
        assert!(!k.contains(0b01));
        assert!(!k.contains(0b10));
    }

    #[test]
    fn kernel_dim_is_cols_minus_rank() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r = rng.gen_range(1..=5);
            let c = rng.gen_range(1..=6);
            let a = BitMat::from_flat(r, c, rng.gen());
            assert_eq!(kernel(&a).dim(), c - a.rank());
        }
    }

    #[test]
    fn dual_examples() {
        let full = Subspace::full(4);
        assert_eq!(full.dual().dim(), 0);
        assert_eq!(Subspace::zero(4).dual(), full);

        // span{e_0} in dim 4: dual has dim 3 and every member has first bit 0.
        let s = Subspace::from_spanning(4, [0b0001]);
        let d = s.dual();
        assert_eq!(d.dim(), 3);
        for v in 0u64..16 {
            assert_eq!(d.contains(v), v & 1 == 0);
        }
    }

    #[test]
    fn coset_rep_trivial_cases() {
        let s = Subspace::from_spanning(4, [0b0011, 0b1100]);
        for &m in &s.members() {
            assert_eq!(s.coset_rep(m), 0);
        }
        let z = Subspace::zero(4);
        for v in 0u64..16 {
            assert_eq!(z.coset_rep(v), v);
        }
    }

    #[test]
    fn solve_affine_consistency() {
        // x0 + x1 = 1, x1 = 1 -> x = (0, 1), unique.
        let (x, dim) = solve_affine(&[0b11, 0b10], 0b11, 2).unwrap();
        assert_eq!((x, dim), (0b10, 0));
        // Inconsistent: x0 = 0 and x0 = 1.
        assert!(solve_affine(&[0b01, 0b01], 0b10, 2).is_none());
        // Underdetermined: one equation in 3 unknowns.
        let (x, dim) = solve_affine(&[0b111], 0b1, 3).unwrap();
        assert_eq!(dim, 2);
        assert_eq!((x & 0b111).count_ones() & 1, 1);
    }

    fn random_subspace(rng: &mut impl Rng, ambient: usize) -> Subspace {
        let k = rng.gen_range(0..=ambient);
        Subspace::from_spanning(ambient, (0..k).map(|_| rng.gen::<u64>()))
    }

    proptest! {
        #[test]
        fn dual_is_involution(seed in 0u64..500) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ambient = rng.gen_range(1..=9usize);
            let s = random_subspace(&mut rng, ambient);
            let d = s.dual();
            prop_assert_eq!(s.dim() + d.dim(), ambient);
            prop_assert_eq!(d.dual(), s);
        }

        #[test]
        fn coset_rep_constant_on_cosets(seed in 0u64..1000) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ambient = rng.gen_range(1..=9usize);
            let s = random_subspace(&mut rng, ambient);
            let x: u64 = rng.gen::<u64>() & ((1 << ambient) - 1);
            let members = s.members();
            let sh = members[rng.gen_range(0..members.len())];
            prop_assert_eq!(s.coset_rep(x ^ sh), s.coset_rep(x));
            // Distinct cosets get distinct representatives.
            let y: u64 = rng.gen::<u64>() & ((1 << ambient) - 1);
            let same_coset = s.contains(x ^ y);
            prop_assert_eq!(s.coset_rep(x) == s.coset_rep(y), same_coset);
        }
    }
}
