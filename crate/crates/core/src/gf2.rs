//! Dense GF(2) vectors and matrices with bit-packed rows.
//!
//! Every row of a [`BitMatrix`] occupies `ceil(n_cols / 64)` consecutive `u64`
//! words; column `j` of a row lives in word `j / 64`, bit `j % 64`. Bits past
//! `n_cols` in the last word of a row are always zero.
//!
//! All operations return new values; nothing mutates its inputs except the
//! explicit `set`/`toggle`/`xor_assign` helpers.

use std::fmt;

use crate::error::{Error, Result};

/// Largest row or column count accepted by the constructors.
pub const MAX_DIM: usize = 1 << 16;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
    }
    Ok(())
}

/// A bit-string over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Indicator vector of a single position.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Low `len` bits of `value`, bit `i` of the integer becoming position `i`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value & if len >= WORD_BITS { u64::MAX } else { tail_mask(len) };
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND, i.e. the GF(2) dot product.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        dot_words(&self.words, &other.words)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + b)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[inline]
fn dot_words(a: &[u64], b: &[u64]) -> bool {
    a.iter()
        .zip(b)
        .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones())
        & 1
        == 1
}

/// Dense GF(2) matrix, row-major with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Result<Self> {
        check_dim(n_rows)?;
        check_dim(n_cols)?;
        let words_per_row = words_for(n_cols);
        Ok(Self {
            n_rows,
            n_cols,
            words_per_row,
            bits: vec![0; n_rows * words_per_row],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, true);
        }
        Ok(m)
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::zeros(n_rows, n_cols)?;
        for i in 0..n_rows {
            for j in 0..n_cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from rows of 0/1 entries. Any nonzero entry counts as 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != n_cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {n_cols}",
                rows[bad].as_ref().len()
            )));
        }
        Self::from_fn(n_rows, n_cols, |i, j| rows[i].as_ref()[j] != 0)
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_row_vecs(n_cols: usize, rows: &[BitVec]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), n_cols)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "row vector {i} has length {}, expected {n_cols}",
                    r.len()
                )));
            }
            m.row_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        let s = i * self.words_per_row;
        &self.bits[s..s + self.words_per_row]
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        let s = i * self.words_per_row;
        &mut self.bits[s..s + self.words_per_row]
    }

    pub fn row_vec(&self, i: usize) -> BitVec {
        BitVec {
            len: self.n_cols,
            words: self.row(i).to_vec(),
        }
    }

    /// Raw packed storage, `words_per_row` words per row.
    pub fn as_words(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i},{j}) out of range");
        (self.bits[i * self.words_per_row + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i},{j}) out of range");
        let w = &mut self.bits[i * self.words_per_row + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i},{j}) out of range");
        self.bits[i * self.words_per_row + j / WORD_BITS] ^= 1u64 << (j % WORD_BITS);
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Entrywise sum over GF(2).
    pub fn xor_assign(&mut self, other: &BitMatrix) -> Result<()> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        Ok(())
    }

    /// True when every row's unused high bits are zero.
    pub fn padding_is_clean(&self) -> bool {
        if self.n_cols.is_multiple_of(WORD_BITS) || self.words_per_row == 0 {
            return true;
        }
        let mask = !tail_mask(self.n_cols);
        (0..self.n_rows).all(|i| self.row(i)[self.words_per_row - 1] & mask == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.n_rows).all(|i| (i + 1..self.n_cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Symmetric with zero diagonal.
    pub fn is_alternating(&self) -> bool {
        self.is_symmetric() && (0..self.n_rows).all(|i| !self.get(i, i))
    }

    /// Square with every entry on or below the diagonal equal to zero.
    pub fn is_strictly_upper(&self) -> bool {
        self.is_square() && (0..self.n_rows).all(|i| (0..=i).all(|j| !self.get(i, j)))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.n_cols, self.n_rows).expect("dimensions already validated");
        for i in 0..self.n_rows {
            for (wi, &w) in self.row(i).iter().enumerate() {
                let mut rest = w;
                while rest != 0 {
                    let j = wi * WORD_BITS + rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// `c + cᵀ` for a strictly upper-triangular `c`; the result is alternating.
    pub fn symmetrize_upper(&self) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::Contract(format!(
                "symmetrize_upper needs a square matrix, got {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        if !self.is_strictly_upper() {
            return Err(Error::Contract(
                "symmetrize_upper needs a strictly upper-triangular matrix".into(),
            ));
        }
        let mut s = self.transpose();
        s.xor_assign(self)?;
        Ok(s)
    }

    /// GF(2) product `self * other`.
    pub fn multiply(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.n_cols != other.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut out = BitMatrix::zeros(self.n_rows, other.n_cols)?;
        let wpr = out.words_per_row;
        for i in 0..self.n_rows {
            let start = i * wpr;
            for (wi, &w) in self.row(i).iter().enumerate() {
                let mut rest = w;
                while rest != 0 {
                    let k = wi * WORD_BITS + rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let src = other.row(k);
                    for (d, s) in out.bits[start..start + wpr].iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if self.n_cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by a vector of length {}",
                self.n_rows,
                self.n_cols,
                v.len()
            )));
        }
        let mut out = BitVec::zeros(self.n_rows);
        for i in 0..self.n_rows {
            if dot_words(self.row(i), v.words()) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Row rank over GF(2), computed on a working copy.
    pub fn rank(&self) -> usize {
        let mut scratch = Vec::new();
        self.rank_with_scratch(&mut scratch)
    }

    /// [`rank`](Self::rank) reusing a caller-owned buffer for the working copy.
    pub fn rank_with_scratch(&self, scratch: &mut Vec<u64>) -> usize {
        scratch.clear();
        scratch.extend_from_slice(&self.bits);
        rank_in_place(scratch, self.n_rows, self.n_cols, self.words_per_row)
    }

    pub fn is_invertible(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::Contract(format!(
                "invertibility is only defined for square matrices, got {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        Ok(self.rank() == self.n_rows)
    }
}

/// Column-pivoted elimination to row echelon form over packed rows.
/// Destroys `rows`; returns the rank.
pub fn rank_in_place(rows: &mut [u64], n_rows: usize, n_cols: usize, words_per_row: usize) -> usize {
    if words_per_row == 1 {
        return rank_single_word(&mut rows[..n_rows]);
    }
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let wi = col / WORD_BITS;
        let mask = 1u64 << (col % WORD_BITS);
        let Some(pivot) = (rank..n_rows).find(|&r| rows[r * words_per_row + wi] & mask != 0) else {
            continue;
        };
        if pivot != rank {
            for w in 0..words_per_row {
                rows.swap(pivot * words_per_row + w, rank * words_per_row + w);
            }
        }
        let (head, tail) = rows.split_at_mut((rank + 1) * words_per_row);
        let prow = &head[rank * words_per_row + wi..];
        for r in 0..n_rows - rank - 1 {
            let row = &mut tail[r * words_per_row..(r + 1) * words_per_row];
            if row[wi] & mask != 0 {
                for (d, s) in row[wi..].iter_mut().zip(prow) {
                    *d ^= s;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank for matrices of at most 64 columns, one word per row.
#[inline]
pub fn rank_single_word(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    let n = rows.len();
    for i in 0..n {
        let pivot_row = rows[i];
        if pivot_row == 0 {
            continue;
        }
        rank += 1;
        let lead = pivot_row & pivot_row.wrapping_neg();
        for r in &mut rows[i + 1..] {
            // branch-free so the loop vectorizes
            *r ^= pivot_row & (((*r & lead) != 0) as u64).wrapping_neg();
        }
    }
    rank
}

/// Rank of an alternating matrix of side `rows.len() <= 64`, one `u64` per
/// row. Eliminates a hyperbolic pair `(i, j)` per step, so the result is
/// only meaningful for alternating input. Destroys `rows`.
pub fn rank_alternating_single_word(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    let n = rows.len();
    for i in 0..n {
        let ri = rows[i];
        if ri == 0 {
            continue;
        }
        let j = ri.trailing_zeros() as usize;
        let rj = std::mem::take(&mut rows[j]);
        rank += 2;
        let (bi, bj) = (1u64 << i, 1u64 << j);
        for r in &mut rows[i + 1..] {
            let a = *r;
            *r = a ^ (ri & ((a & bj != 0) as u64).wrapping_neg()) ^ (rj & ((a & bi != 0) as u64).wrapping_neg());
        }
    }
    rank
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                f.write_str(if self.get(i, j) { "1" } else { "." })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
