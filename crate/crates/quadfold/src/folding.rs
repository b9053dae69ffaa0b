//! The quadratic code, per-vertex folding spaces, folded colorings, and their
//! Walsh spectra.
//!
//! For a vertex with constraint functionals `C`, the admissible label space is
//! `W = {M symmetric : <c, M> = 0 for all c in C}` (flattened), and the
//! folding space is `H = dual(W)`. A coloring assigned on cosets of `H`
//! extends to the whole matrix space as a function constant on cosets, which
//! pins its Walsh support inside `W`.
//!
//! Cosets are indexed densely: the canonical representative of a coset is its
//! reduction by the RREF basis of `H`, representatives are supported on the
//! free coordinates of `H`, and the index is the integer read off those free
//! coordinates in ascending order. Index arithmetic is xor.

use crate::exact::{Dyadic, Rat};
use crate::gf2::{mat_inner, outer_product, symmetric_basis, BitMat, BitVec, Subspace};
use crate::{Error, Result};
use rand::Rng;

/// Which verifier test a coloring is meant for: the 8-query 2-color test or
/// the 4-query 4-color test on paired cosets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    EightQuery,
    FourQuery,
}

impl Mode {
    pub fn colors(&self) -> usize {
        match self {
            Mode::EightQuery => 2,
            Mode::FourQuery => 4,
        }
    }

    pub fn uniformity(&self) -> usize {
        match self {
            Mode::EightQuery => 8,
            Mode::FourQuery => 4,
        }
    }

    pub fn code(&self) -> u32 {
        match self {
            Mode::EightQuery => 28,
            Mode::FourQuery => 44,
        }
    }

    pub fn from_code(code: u32) -> Result<Mode> {
        match code {
            28 => Ok(Mode::EightQuery),
            44 => Ok(Mode::FourQuery),
            other => Err(Error::InvalidParameter(format!("unknown mode {other}, expected 28 or 44"))),
        }
    }
}

/// The quadratic code of a vector: `X -> <X, x ⊗ x>`.
#[derive(Clone, Debug)]
pub struct QuadraticCode {
    outer: BitMat,
}

impl QuadraticCode {
    pub fn new(x: &BitVec) -> Self {
        QuadraticCode { outer: outer_product(x, x) }
    }

    pub fn eval(&self, point: &BitMat) -> u8 {
        mat_inner(point, &self.outer)
    }

    pub fn outer(&self) -> &BitMat {
        &self.outer
    }
}

/// Per-vertex folding data: the admissible space `W`, its dual `H`, and the
/// dense coset index over canonical representatives.
#[derive(Clone, Debug)]
pub struct FoldingSpace {
    m: usize,
    w: Subspace,
    h: Subspace,
    free: Vec<usize>,
}

impl FoldingSpace {
    /// Intersect the symmetric subspace with the constraint kernels and
    /// dualize.
    pub fn build(m: usize, constraints: &[BitMat]) -> FoldingSpace {
        let ambient = m * m;
        for c in constraints {
            assert_eq!((c.rows(), c.cols()), (m, m), "constraint shape mismatch");
        }
        let sym = Subspace::from_spanning(ambient, symmetric_basis(m).iter().map(|b| b.flat_bits()));
        let mut w_members: Vec<u64> = Vec::new();
        for &s in sym.members().iter() {
            if constraints.iter().all(|c| (c.flat_bits() & s).count_ones() & 1 == 0) {
                w_members.push(s);
            }
        }
        let w = Subspace::from_spanning(ambient, w_members);
        let h = w.dual();
        let free = h.free_coords();
        FoldingSpace { m, w, h, free }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        self.m * self.m
    }

    pub fn admissible(&self) -> &Subspace {
        &self.w
    }

    pub fn folding_subspace(&self) -> &Subspace {
        &self.h
    }

    pub fn coset_count(&self) -> usize {
        1 << self.free.len()
    }

    /// log2 of the coset count.
    pub fn index_bits(&self) -> u32 {
        self.free.len() as u32
    }

    pub fn canonical_rep(&self, x: u64) -> u64 {
        self.h.coset_rep(x)
    }

    /// Dense index of the coset containing `x`. Compatible with addition:
    /// `index(x ^ y) = index(x) ^ index(y)`.
    pub fn coset_index(&self, x: u64) -> usize {
        let rep = self.canonical_rep(x);
        let mut idx = 0usize;
        for (bit, &coord) in self.free.iter().enumerate() {
            idx |= (((rep >> coord) & 1) as usize) << bit;
        }
        idx
    }

    pub fn coset_index_of(&self, x: &BitMat) -> usize {
        self.coset_index(x.flat_bits())
    }

    /// Canonical representative of the coset with the given index.
    pub fn rep_of_index(&self, idx: usize) -> u64 {
        assert!(idx < self.coset_count());
        let mut rep = 0u64;
        for (bit, &coord) in self.free.iter().enumerate() {
            if (idx >> bit) & 1 == 1 {
                rep |= 1 << coord;
            }
        }
        rep
    }

    pub fn rep_matrix(&self, idx: usize) -> BitMat {
        BitMat::from_flat(self.m, self.m, self.rep_of_index(idx))
    }
}

/// The bit `<alpha, e_m ⊗ e_m>`, i.e. the bottom-right entry of `alpha`.
pub fn corner_bit(alpha: &BitMat) -> u8 {
    alpha.get(alpha.rows() - 1, alpha.cols() - 1)
}

/// A per-vertex coloring table on cosets (8-query mode) or coset pairs
/// (4-query mode), extended implicitly to the full matrix space by folding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedColoring {
    mode: Mode,
    tables: Vec<Vec<u8>>,
}

impl FoldedColoring {
    pub fn new(mode: Mode, tables: Vec<Vec<u8>>, spaces: &[FoldingSpace]) -> Result<Self> {
        if tables.len() != spaces.len() {
            return Err(Error::InvalidParameter(format!(
                "coloring has {} vertex tables, instance has {} vertices",
                tables.len(),
                spaces.len()
            )));
        }
        for (v, (table, space)) in tables.iter().zip(spaces).enumerate() {
            let want = Self::domain_size_for(mode, space);
            if table.len() != want {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v}: table has {} entries, expected {want}",
                    table.len()
                )));
            }
            if let Some(&bad) = table.iter().find(|&&c| (c as usize) >= mode.colors()) {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v}: color {bad} out of range for {} colors",
                    mode.colors()
                )));
            }
        }
        Ok(FoldedColoring { mode, tables })
    }

    pub fn domain_size_for(mode: Mode, space: &FoldingSpace) -> usize {
        match mode {
            Mode::EightQuery => space.coset_count(),
            Mode::FourQuery => space.coset_count() * space.coset_count(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tables(&self) -> &[Vec<u8>] {
        &self.tables
    }

    pub fn table(&self, v: usize) -> Result<&[u8]> {
        self.tables.get(v).map(|t| t.as_slice()).ok_or(Error::UnknownVertex(v))
    }

    /// Value at a domain index (coset index, or packed pair index).
    pub fn value(&self, v: usize, idx: usize) -> u8 {
        self.tables[v][idx]
    }

    /// Evaluate the extension at a matrix point (8-query mode).
    pub fn eval(&self, v: usize, space: &FoldingSpace, point: &BitMat) -> Result<u8> {
        let table = self.table(v)?;
        assert!(self.mode == Mode::EightQuery, "eval is for the 8-query mode");
        Ok(table[space.coset_index_of(point)])
    }

    /// Evaluate the extension at a pair of matrix points (4-query mode).
    pub fn eval_pair(&self, v: usize, space: &FoldingSpace, p1: &BitMat, p2: &BitMat) -> Result<u8> {
        let table = self.table(v)?;
        assert!(self.mode == Mode::FourQuery, "eval_pair is for the 4-query mode");
        let cc = space.coset_count();
        Ok(table[space.coset_index_of(p1) * cc + space.coset_index_of(p2)])
    }

    /// 0/1 indicator of one color class, on the same domain.
    pub fn class_indicator(&self, color: u8) -> FoldedColoring {
        let tables = self
            .tables
            .iter()
            .map(|t| t.iter().map(|&c| u8::from(c == color)).collect())
            .collect();
        FoldedColoring { mode: self.mode, tables }
    }

    pub fn is_indicator(&self) -> bool {
        self.tables.iter().all(|t| t.iter().all(|&c| c <= 1))
    }

    pub fn ensure_indicator(&self) -> Result<()> {
        if self.is_indicator() {
            Ok(())
        } else {
            Err(Error::NotIndicator("coloring uses colors other than 0/1".into()))
        }
    }

    /// Per-vertex, per-color fraction of the domain.
    pub fn densities(&self) -> Vec<Vec<Rat>> {
        self.tables
            .iter()
            .map(|t| {
                (0..self.mode.colors() as u8)
                    .map(|c| {
                        let hits = t.iter().filter(|&&x| x == c).count();
                        Rat::new((hits as i64).into(), (t.len() as i64).into())
                    })
                    .collect()
            })
            .collect()
    }

    /// Uniformly random coloring table per vertex.
    pub fn random(mode: Mode, spaces: &[FoldingSpace], rng: &mut impl Rng) -> FoldedColoring {
        let tables = spaces
            .iter()
            .map(|s| {
                (0..Self::domain_size_for(mode, s))
                    .map(|_| rng.gen_range(0..mode.colors()) as u8)
                    .collect()
            })
            .collect();
        FoldedColoring { mode, tables }
    }

    /// Full-domain table of the extension over all `2^(m^2)` points
    /// (8-query mode), for spectrum checks.
    pub fn extension_table(&self, v: usize, space: &FoldingSpace) -> Result<Vec<u8>> {
        let table = self.table(v)?;
        assert!(self.mode == Mode::EightQuery);
        let n = 1usize << space.ambient_dim();
        Ok((0..n as u64).map(|x| table[space.coset_index(x)]).collect())
    }
}

/// Walsh spectrum of a 0/1 table over `n_bits` input bits, held exactly.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n_bits: usize,
    coeffs: Vec<Dyadic>,
}

impl Spectrum {
    /// Transform a table of size `2^n_bits`. Feasible for `n_bits <= 16`.
    pub fn from_table(table: &[u8]) -> Result<Spectrum> {
        let n_bits = table.len().trailing_zeros() as usize;
        if table.len() != 1 << n_bits {
            return Err(Error::InvalidParameter("table length must be a power of two".into()));
        }
        if n_bits > 16 {
            return Err(Error::TooLarge(format!(
                "spectrum over {n_bits} bits needs a table of {} reals",
                1u64 << n_bits
            )));
        }
        let mut work: Vec<i64> = table.iter().map(|&b| b as i64).collect();
        walsh_in_place(&mut work);
        let coeffs = work.into_iter().map(|c| Dyadic::new(c as i128, n_bits as u32)).collect();
        Ok(Spectrum { n_bits, coeffs })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// Coefficient at character `alpha` (flattened bits).
    pub fn coeff(&self, alpha: u64) -> Dyadic {
        self.coeffs[alpha as usize]
    }

    pub fn support(&self) -> impl Iterator<Item = (u64, Dyadic)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| (a as u64, *c))
    }

    /// Exact Parseval mass `sum_alpha coeff^2`.
    pub fn parseval_mass(&self) -> Dyadic {
        self.coeffs.iter().fold(Dyadic::ZERO, |acc, c| acc + c.square())
    }
}

/// In-place Walsh-Hadamard transform (unnormalized).
pub fn walsh_in_place(data: &mut [i64]) {
    let n = data.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let (x, y) = (data[j], data[j + h]);
                data[j] = x + y;
                data[j + h] = x - y;
            }
            i += h * 2;
        }
        h *= 2;
    }
}

/// True iff every nonzero Walsh coefficient of the extension of `col` at `v`
/// sits inside the admissible space `W`. Folding forces this; an unfolded
/// table fails it.
pub fn check_folding_support(table: &[u8], space: &FoldingSpace) -> Result<bool> {
    let spectrum = Spectrum::from_table(table)?;
    let ok = spectrum.support().all(|(alpha, _)| space.admissible().contains(alpha));
    Ok(ok)
}

/// Walsh coefficients of a folded 0/1 coset table, computed on the quotient:
/// only characters in `W` can be nonzero, and for `alpha` in `W` the
/// coefficient is the coset-level correlation.
pub fn coset_spectrum(table: &[u8], space: &FoldingSpace) -> Vec<(BitMat, Dyadic)> {
    let t = space.index_bits();
    let mut out = Vec::new();
    for alpha in space.admissible().members() {
        let mut acc = 0i64;
        for (idx, &v) in table.iter().enumerate() {
            if v == 1 {
                let rep = space.rep_of_index(idx);
                acc += if (alpha & rep).count_ones() & 1 == 0 { 1 } else { -1 };
            }
        }
        if acc != 0 {
            out.push((
                BitMat::from_flat(space.m(), space.m(), alpha),
                Dyadic::new(acc as i128, t),
            ));
        }
    }
    out
}

/// Autocorrelation counts of a 0/1 table over the xor group of its index
/// space: `counts[d] = #{i : table[i] = table[i ^ d] = 1}`.
pub fn autocorrelation_counts(table: &[u8]) -> Vec<i64> {
    let n = table.len();
    assert!(n.is_power_of_two());
    let mut work: Vec<i64> = table.iter().map(|&b| b as i64).collect();
    walsh_in_place(&mut work);
    for x in work.iter_mut() {
        *x *= *x;
    }
    walsh_in_place(&mut work);
    work.into_iter()
        .map(|c| {
            debug_assert_eq!(c % n as i64, 0);
            c / n as i64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn space_m2_free() -> FoldingSpace {
        FoldingSpace::build(2, &[])
    }

    #[test]
    fn folding_space_m2_no_constraints() {
        // Oracle: classify all 16 flattened 2x2 matrices by symmetry.
        let space = space_m2_free();
        let symmetric: Vec<u64> = (0..16u64)
            .filter(|&b| BitMat::from_flat(2, 2, b).is_symmetric())
            .collect();
        assert_eq!(symmetric.len(), 8); // dim W = 3
        assert_eq!(space.admissible().dim(), 3);
        for s in symmetric {
            assert!(space.admissible().contains(s));
        }
        assert_eq!(space.folding_subspace().dim(), 1);
        assert_eq!(space.coset_count(), 8);
    }

    #[test]
    fn folding_space_degenerate_constraints() {
        // Constraints spanning every functional force W = {0}, one coset.
        let constraints: Vec<BitMat> = (0..4).map(|k| BitMat::from_flat(2, 2, 1 << k)).collect();
        let space = FoldingSpace::build(2, &constraints);
        assert_eq!(space.admissible().dim(), 0);
        assert_eq!(space.folding_subspace().dim(), 4);
        assert_eq!(space.coset_count(), 1);
    }

    #[test]
    fn planted_label_is_admissible() {
        // A constraint vanishing on y ⊗ y keeps y ⊗ y inside W.
        let y = BitVec::from_slice(&[1, 1]);
        let yy = outer_product(&y, &y);
        let c = BitMat::from_rows(&[vec![1, 1], vec![0, 0]]); // <c, yy> = 0
        assert_eq!(mat_inner(&c, &yy), 0);
        let space = FoldingSpace::build(2, &[c]);
        assert!(space.admissible().contains(yy.flat_bits()));
    }

    #[test]
    fn coset_index_is_xor_compatible() {
        let y = BitVec::from_slice(&[0, 1]);
        let c = BitMat::from_rows(&[vec![1, 0], vec![0, 0]]);
        assert_eq!(mat_inner(&c, &outer_product(&y, &y)), 0);
        for space in [space_m2_free(), FoldingSpace::build(2, &[c])] {
            for x in 0..16u64 {
                for yb in 0..16u64 {
                    assert_eq!(
                        space.coset_index(x ^ yb),
                        space.coset_index(x) ^ space.coset_index(yb)
                    );
                }
                let idx = space.coset_index(x);
                assert_eq!(space.coset_index(space.rep_of_index(idx)), idx);
            }
        }
    }

    #[test]
    fn quadratic_code_basics() {
        // x = e_m picks out the bottom-right entry.
        let m = 3;
        let code = QuadraticCode::new(&BitVec::last_unit(m));
        for xb in 0..512u64 {
            let x = BitMat::from_flat(m, m, xb);
            assert_eq!(code.eval(&x), x.get(m - 1, m - 1));
        }

        // Hand expansion: m=3, x=(1,0,1), point e_0 ⊗ e_2 gives x_0 x_2 = 1.
        let code = QuadraticCode::new(&BitVec::from_slice(&[1, 0, 1]));
        let point = outer_product(&BitVec::unit(3, 0), &BitVec::unit(3, 2));
        assert_eq!(code.eval(&point), 1);

        // Linearity in the query point.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let m = 4;
            let code = QuadraticCode::new(&BitVec::from_bits(m, rand::Rng::gen(&mut rng)));
            let a = BitMat::from_flat(m, m, rand::Rng::gen(&mut rng));
            let b = BitMat::from_flat(m, m, rand::Rng::gen(&mut rng));
            assert_eq!(code.eval(&(a + b)), code.eval(&a) ^ code.eval(&b));
        }
    }

    #[test]
    fn folded_evaluation_constant_on_cosets() {
        let space = space_m2_free();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let col = FoldedColoring::random(Mode::EightQuery, std::slice::from_ref(&space), &mut rng);
        for xb in 0..16u64 {
            let x = BitMat::from_flat(2, 2, xb);
            for h in space.folding_subspace().members() {
                let shifted = BitMat::from_flat(2, 2, xb ^ h);
                assert_eq!(col.eval(0, &space, &x).unwrap(), col.eval(0, &space, &shifted).unwrap());
            }
        }
    }

    #[test]
    fn honest_table_matches_quadratic_code() {
        let space = space_m2_free();
        let y = BitVec::from_slice(&[1, 1]);
        let code = QuadraticCode::new(&y);
        let table: Vec<u8> = (0..space.coset_count())
            .map(|i| code.eval(&space.rep_matrix(i)))
            .collect();
        let col = FoldedColoring::new(Mode::EightQuery, vec![table], std::slice::from_ref(&space)).unwrap();
        for xb in 0..16u64 {
            let x = BitMat::from_flat(2, 2, xb);
            assert_eq!(col.eval(0, &space, &x).unwrap(), code.eval(&x));
        }
    }

    #[test]
    fn spectrum_constant_function() {
        let table = vec![1u8; 16];
        let s = Spectrum::from_table(&table).unwrap();
        assert_eq!(s.coeff(0), Dyadic::ONE);
        for a in 1..16 {
            assert!(s.coeff(a).is_zero());
        }
    }

    #[test]
    fn spectrum_of_linear_indicator() {
        // A(X) = <X, beta> as a 0/1 function: coeff 1/2 at 0, -1/2 at beta.
        let beta = 0b0110u64;
        let table: Vec<u8> = (0..16u64).map(|x| ((x & beta).count_ones() & 1) as u8).collect();
        let s = Spectrum::from_table(&table).unwrap();
        for a in 0..16u64 {
            let expected = if a == 0 {
                Dyadic::new(1, 1)
            } else if a == beta {
                Dyadic::new(-1, 1)
            } else {
                Dyadic::ZERO
            };
            assert_eq!(s.coeff(a), expected, "alpha = {a}");
        }
    }

    #[test]
    fn walsh_matches_direct_dft() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let bits = 6;
            let table: Vec<u8> = (0..1 << bits).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
            let s = Spectrum::from_table(&table).unwrap();
            for alpha in 0..1u64 << bits {
                let mut acc = 0i64;
                for (x, &v) in table.iter().enumerate() {
                    if v == 1 {
                        acc += if (alpha & x as u64).count_ones() & 1 == 0 { 1 } else { -1 };
                    }
                }
                assert_eq!(s.coeff(alpha), Dyadic::new(acc as i128, bits as u32));
            }
        }
    }

    #[test]
    fn parseval_exact_and_float() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for m in [2usize, 3] {
            let space = FoldingSpace::build(m, &[]);
            for _ in 0..50 {
                let col = FoldedColoring::random(Mode::EightQuery, std::slice::from_ref(&space), &mut rng);
                let table = col.extension_table(0, &space).unwrap();
                let s = Spectrum::from_table(&table).unwrap();
                let ones = table.iter().filter(|&&b| b == 1).count() as i128;
                // Parseval: sum of squared coefficients equals the density.
                let density = Dyadic::new(ones, (m * m) as u32);
                assert_eq!(s.parseval_mass(), density);
                assert!((s.parseval_mass().to_f64() - density.to_f64()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn folding_support_master_property() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let y = BitVec::from_slice(&[0, 1]);
        let yy = outer_product(&y, &y);
        for _ in 0..50 {
            // Random constraint vanishing on y ⊗ y.
            let mut c = BitMat::from_flat(2, 2, rand::Rng::gen_range(&mut rng, 0..16));
            if mat_inner(&c, &yy) == 1 {
                c.set(1, 1, c.get(1, 1) ^ 1);
            }
            let space = FoldingSpace::build(2, &[c]);
            let col = FoldedColoring::random(Mode::EightQuery, std::slice::from_ref(&space), &mut rng);
            let table = col.extension_table(0, &space).unwrap();
            assert!(check_folding_support(&table, &space).unwrap());
        }
    }

    #[test]
    fn unfolded_table_fails_support_check() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        let c = BitMat::from_rows(&[vec![1, 0], vec![0, 0]]);
        let space = FoldingSpace::build(2, &[c]);
        assert!(space.coset_count() < 16);
        let mut failures = 0;
        for _ in 0..10 {
            // Random full-domain tables; resample the rare accidental fold.
            loop {
                let table: Vec<u8> = (0..16).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
                if !check_folding_support(&table, &space).unwrap() {
                    failures += 1;
                    break;
                }
            }
        }
        assert_eq!(failures, 10);
    }

    #[test]
    fn honest_support_is_zero_and_label() {
        let space = space_m2_free();
        let y = BitVec::from_slice(&[1, 1]);
        let code = QuadraticCode::new(&y);
        let table: Vec<u8> = (0..16u64)
            .map(|x| code.eval(&BitMat::from_flat(2, 2, x)))
            .collect();
        let s = Spectrum::from_table(&table).unwrap();
        let support: Vec<u64> = s.support().map(|(a, _)| a).collect();
        assert_eq!(support, vec![0, code.outer().flat_bits()]);
        for (a, _) in s.support() {
            assert!(space.admissible().contains(a));
        }
    }

    #[test]
    fn coset_spectrum_agrees_with_full_transform() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(55);
        let c = BitMat::from_rows(&[vec![0, 0], vec![0, 1]]);
        let space = FoldingSpace::build(2, &[c]);
        for _ in 0..20 {
            let col = FoldedColoring::random(Mode::EightQuery, std::slice::from_ref(&space), &mut rng);
            let full = Spectrum::from_table(&col.extension_table(0, &space).unwrap()).unwrap();
            let quot = coset_spectrum(col.table(0).unwrap(), &space);
            let mut from_quot: std::collections::HashMap<u64, Dyadic> = Default::default();
            for (mat, coeff) in &quot {
                from_quot.insert(mat.flat_bits(), *coeff);
            }
            for (alpha, coeff) in full.support() {
                assert_eq!(from_quot.remove(&alpha), Some(coeff));
            }
            assert!(from_quot.is_empty());
        }
    }

    #[test]
    fn autocorrelation_matches_double_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let n = 64usize;
            let table: Vec<u8> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
            let counts = autocorrelation_counts(&table);
            for d in 0..n {
                let direct = (0..n).filter(|&i| table[i] == 1 && table[i ^ d] == 1).count() as i64;
                assert_eq!(counts[d], direct);
            }
        }
    }

    #[test]
    fn densities_match_recount() {
        let space = space_m2_free();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        let col = FoldedColoring::random(Mode::FourQuery, std::slice::from_ref(&space), &mut rng);
        let dens = col.densities();
        let table = col.table(0).unwrap();
        for c in 0..4u8 {
            let hits = table.iter().filter(|&&x| x == c).count();
            assert_eq!(dens[0][c as usize], Rat::new((hits as i64).into(), (table.len() as i64).into()));
        }
    }
}
