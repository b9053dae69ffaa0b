use std::fmt;
use std::ops::{Add, BitXor};

/// A vector over GF(2), at most 64 coordinates, packed into one word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    bits: u64,
}

impl BitVec {
    pub fn zero(len: usize) -> Self {
        assert!((1..=64).contains(&len), "vector length {len} out of range");
        BitVec { len, bits: 0 }
    }

    pub fn from_bits(len: usize, bits: u64) -> Self {
        let mut v = Self::zero(len);
        v.bits = bits & v.mask();
        v
    }

    pub fn from_slice(coords: &[u8]) -> Self {
        let mut v = Self::zero(coords.len());
        for (i, &c) in coords.iter().enumerate() {
            v.set(i, c & 1);
        }
        v
    }

    /// Standard basis vector `e_i` (0-indexed coordinate).
    pub fn unit(len: usize, i: usize) -> Self {
        assert!(i < len);
        BitVec { len, bits: 1 << i }
    }

    /// The vector with only the last (`len`-th, 1-indexed) coordinate set.
    pub fn last_unit(len: usize) -> Self {
        Self::unit(len, len - 1)
    }

    fn mask(&self) -> u64 {
        if self.len == 64 { u64::MAX } else { (1 << self.len) - 1 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len);
        ((self.bits >> i) & 1) as u8
    }

    pub fn set(&mut self, i: usize, value: u8) {
        assert!(i < self.len);
        if value & 1 == 1 {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> u8 {
        assert_eq!(self.len, other.len, "dimension mismatch");
        ((self.bits & other.bits).count_ones() & 1) as u8
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl Add for BitVec {
    type Output = BitVec;
    fn add(self, rhs: BitVec) -> BitVec {
        assert_eq!(self.len, rhs.len, "dimension mismatch");
        BitVec { len: self.len, bits: self.bits ^ rhs.bits }
    }
}

impl BitXor for BitVec {
    type Output = BitVec;
    fn bitxor(self, rhs: BitVec) -> BitVec {
        self + rhs
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i))?;
        }
        write!(f, "]")
    }
}

/// A matrix over GF(2) with at most 64 entries, flattened row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMat {
    rows: usize,
    cols: usize,
    bits: u64,
}

impl BitMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1 && rows * cols <= 64, "matrix shape out of range");
        BitMat { rows, cols, bits: 0 }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_flat(rows: usize, cols: usize, bits: u64) -> Self {
        let mut m = Self::zero(rows, cols);
        m.bits = bits & m.mask();
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v & 1);
            }
        }
        m
    }

    fn mask(&self) -> u64 {
        let n = self.rows * self.cols;
        if n == 64 { u64::MAX } else { (1 << n) - 1 }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        assert!(i < self.rows && j < self.cols);
        ((self.bits >> (i * self.cols + j)) & 1) as u8
    }

    pub fn set(&mut self, i: usize, j: usize, value: u8) {
        assert!(i < self.rows && j < self.cols);
        let k = i * self.cols + j;
        if value & 1 == 1 {
            self.bits |= 1 << k;
        } else {
            self.bits &= !(1 << k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Row `i` as a packed word over `cols` bits.
    pub fn row_bits(&self, i: usize) -> u64 {
        assert!(i < self.rows);
        (self.bits >> (i * self.cols)) & (if self.cols == 64 { u64::MAX } else { (1 << self.cols) - 1 })
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_bits(self.cols, self.row_bits(i))
    }

    /// Flattened row-major view as a vector of length `rows*cols`.
    pub fn flat(&self) -> BitVec {
        BitVec { len: self.rows * self.cols, bits: self.bits }
    }

    pub fn flat_bits(&self) -> u64 {
        self.bits
    }

    pub fn transpose(&self) -> BitMat {
        let mut t = BitMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    /// Matrix-vector product `A x`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        let mut out = BitVec::zero(self.rows);
        for i in 0..self.rows {
            out.set(i, ((self.row_bits(i) & x.bits()).count_ones() & 1) as u8);
        }
        out
    }

    /// Matrix product `A B`.
    pub fn mul(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let bt = other.transpose();
        let mut out = BitMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            let ri = self.row_bits(i);
            for j in 0..other.cols {
                out.set(i, j, ((ri & bt.row_bits(j)).count_ones() & 1) as u8);
            }
        }
        out
    }

    /// Rank over GF(2) by Gaussian elimination on the rows.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<u64> = (0..self.rows).map(|i| self.row_bits(i)).collect();
        rank_of_rows(&mut rows)
    }

    pub fn entries(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }
}

impl Add for BitMat {
    type Output = BitMat;
    fn add(self, rhs: BitMat) -> BitMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        BitMat { rows: self.rows, cols: self.cols, bits: self.bits ^ rhs.bits }
    }
}

impl fmt::Debug for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMat {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Outer product `x ⊗ y`: entry `(i, j)` is `x_i * y_j`.
pub fn outer_product(x: &BitVec, y: &BitVec) -> BitMat {
    let mut m = BitMat::zero(x.len(), y.len());
    for i in 0..x.len() {
        if x.get(i) == 1 {
            m.bits |= (y.bits() as u64) << (i * y.len());
        }
    }
    m
}

/// Entrywise inner product `<X, Y> = sum X_ij Y_ij` mod 2.
pub fn mat_inner(x: &BitMat, y: &BitMat) -> u8 {
    assert_eq!((x.rows, x.cols), (y.rows, y.cols), "shape mismatch");
    ((x.bits & y.bits).count_ones() & 1) as u8
}

/// In-place elimination; returns the rank. Pivot of a row is its lowest set bit.
pub(crate) fn rank_of_rows(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        if rows[i] == 0 {
            continue;
        }
        let pivot = rows[i].trailing_zeros();
        let pivot_row = rows[i];
        for (j, row) in rows.iter_mut().enumerate() {
            if j != i && (*row >> pivot) & 1 == 1 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
    }
    rank
}
