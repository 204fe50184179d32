//! Dense linear algebra over GF(2) and brute-force code-property oracles.
//!
//! Matrices are stored row-major with each row packed into `u64` words, so
//! elimination and syndrome computation work a word at a time.

use std::fmt;

use crate::error::{Error, Result};

/// Default limit on the kernel dimension explored by [`enumerate_codewords`].
pub const DEFAULT_ENUMERATION_BUDGET: usize = 24;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A binary matrix with word-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    /// All-zero matrix. Both dimensions must be positive.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from rows of 0/1 bytes.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        if rows.is_empty() || rows[0].as_ref().is_empty() {
            return Err(Error::Dimension("empty matrix".into()));
        }
        let cols = rows[0].as_ref().len();
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(r, c, true),
                    _ => return Err(Error::Dimension(format!("entry ({r}, {c}) is {b}, not a bit"))),
                }
            }
        }
        Ok(m)
    }

    /// Build from a list of one-positions.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("{rows}x{cols}")));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            m.set(r, c, true);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.words[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.row_words(r).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Row indices of the ones in column `c`, ascending.
    pub fn col_ones(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c)).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows).map(|r| self.row_weight(r)).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0usize; self.cols];
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                w[c] += 1;
            }
        }
        w
    }

    /// Total number of ones (Tanner-graph edges).
    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) as u8).collect())
            .collect()
    }

    /// GF(2) rank by Gaussian elimination on a private copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    /// Reduce in place to reduced row echelon form and return the pivot
    /// column of each nonzero row, in row order.
    fn row_reduce(&mut self) -> Vec<usize> {
        let stride = self.stride;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let wi = col / WORD;
            let mask = 1u64 << (col % WORD);
            let Some(p) = (row..self.rows).find(|&r| self.words[r * stride + wi] & mask != 0) else {
                continue;
            };
            if p != row {
                for k in 0..stride {
                    self.words.swap(p * stride + k, row * stride + k);
                }
            }
            let (head, tail) = self.words.split_at_mut(row * stride);
            let (pivot_row, rest) = tail.split_at_mut(stride);
            for r in 0..self.rows {
                let target = if r < row {
                    &mut head[r * stride..(r + 1) * stride]
                } else if r > row {
                    let off = (r - row - 1) * stride;
                    &mut rest[off..off + stride]
                } else {
                    continue;
                };
                if target[wi] & mask != 0 {
                    for k in wi..stride {
                        target[k] ^= pivot_row[k];
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// A basis of the right kernel {x : H x = 0}.
    pub fn kernel_basis(&self) -> Vec<Codeword> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = Codeword::zeros(self.cols);
            v.set(free, true);
            for (i, &p) in pivots.iter().enumerate() {
                if m.get(i, free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Columns that are not pivots of the reduced row echelon form. Setting
    /// these freely determines a codeword, so they serve as information
    /// positions for codes without a natural systematic layout.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Syndrome H·x over GF(2), one bit per row.
    pub fn syndrome(&self, x: &Codeword) -> Vec<u8> {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|r| {
                let parity: u32 = self
                    .row_words(r)
                    .iter()
                    .zip(&x.words)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (parity & 1) as u8
            })
            .collect()
    }

    pub fn is_codeword(&self, x: &Codeword) -> bool {
        self.syndrome(x).iter().all(|&s| s == 0)
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    /// Submatrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.words[i * self.stride..(i + 1) * self.stride].copy_from_slice(self.row_words(r));
        }
        out
    }

    /// Write `block` into this matrix with its top-left corner at (`r0`, `c0`).
    pub fn place(&mut self, r0: usize, c0: usize, block: &BitMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in block.row_ones(r) {
                self.set(r0 + r, c0 + c, true);
            }
        }
    }

    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "vstack column mismatch {} vs {}",
                self.cols, other.cols
            )));
        }
        let mut words = self.words.clone();
        words.extend_from_slice(&other.words);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            words,
        })
    }

    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "hstack row mismatch {} vs {}",
                self.rows, other.rows
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        out.place(0, 0, self);
        out.place(0, self.cols, other);
        Ok(out)
    }

    /// Product `self · other` over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row_ones(r) {
                let src = other.row_words(k);
                let dst = &mut out.words[r * out.stride..(r + 1) * out.stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        Ok(out)
    }

    /// Add row `src` into row `dst` (row operation, used by property tests).
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        for k in 0..self.stride {
            let v = self.words[src * self.stride + k];
            self.words[dst * self.stride + k] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.words.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    /// Number of column pairs that share at least two rows, i.e. the number
    /// of length-4 cycles in the Tanner graph counted per column pair.
    pub fn four_cycles(&self) -> usize {
        use std::collections::HashMap;
        let mut seen: HashMap<(usize, usize), u32> = HashMap::new();
        for r in 0..self.rows {
            let ones = self.row_ones(r);
            for (i, &a) in ones.iter().enumerate() {
                for &b in &ones[i + 1..] {
                    *seen.entry((a, b)).or_default() += 1;
                }
            }
        }
        seen.values().filter(|&&n| n >= 2).count()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// A packed binary vector of length N.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    len: usize,
    words: Vec<u64>,
}

impl Codeword {
    pub fn zeros(len: usize) -> Self {
        Codeword {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut c = Codeword::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                c.set(i, true);
            }
        }
        c
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.bit(i) as u8).collect()
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor_assign(&mut self, other: &Codeword) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.bit(i) { '1' } else { '0' }).collect();
        write!(f, "Codeword({s})")
    }
}

/// Blockwise Hamming weights of a word split into `nc` equal fading blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockProfile {
    pub weights: Vec<usize>,
}

impl BlockProfile {
    pub fn nc(&self) -> usize {
        self.weights.len()
    }

    pub fn total(&self) -> usize {
        self.weights.iter().sum()
    }

    /// Number of blocks carrying nonzero weight.
    pub fn active_blocks(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0).count()
    }

    pub fn min_weight(&self) -> usize {
        self.weights.iter().copied().min().unwrap_or(0)
    }
}

/// Precomputed per-block bit masks for a given length and block count.
struct BlockMasks {
    masks: Vec<Vec<u64>>,
}

impl BlockMasks {
    fn new(len: usize, nc: usize) -> Result<Self> {
        if nc == 0 || !len.is_multiple_of(nc) {
            return Err(Error::Dimension(format!(
                "length {len} is not divisible into {nc} blocks"
            )));
        }
        let ell = len / nc;
        let masks = (0..nc)
            .map(|j| {
                let mut m = Codeword::zeros(len);
                for i in j * ell..(j + 1) * ell {
                    m.set(i, true);
                }
                m.words
            })
            .collect();
        Ok(BlockMasks { masks })
    }

    fn profile(&self, c: &Codeword) -> BlockProfile {
        let weights = self
            .masks
            .iter()
            .map(|m| {
                m.iter()
                    .zip(&c.words)
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum()
            })
            .collect();
        BlockProfile { weights }
    }
}

/// Blockwise weights of `c`: bit i (0-based) belongs to block `i / (N/nc)`.
pub fn block_profile(c: &Codeword, nc: usize) -> Result<BlockProfile> {
    Ok(BlockMasks::new(c.len(), nc)?.profile(c))
}

/// Visit every codeword of ker(H), starting with the zero word, in Gray-code
/// order. Fails when the kernel dimension exceeds `budget`.
pub fn for_each_codeword(
    h: &BitMatrix,
    budget: usize,
    mut visit: impl FnMut(&Codeword),
) -> Result<u64> {
    let basis = h.kernel_basis();
    let k = basis.len();
    if k > budget || k >= 63 {
        return Err(Error::BudgetExceeded {
            dimension: k,
            limit: budget,
        });
    }
    let mut cur = Codeword::zeros(h.cols());
    visit(&cur);
    let total = 1u64 << k;
    for i in 1..total {
        cur.xor_assign(&basis[i.trailing_zeros() as usize]);
        visit(&cur);
    }
    Ok(total)
}

/// All codewords of ker(H), including the zero word.
pub fn enumerate_codewords(h: &BitMatrix) -> Result<Vec<Codeword>> {
    enumerate_codewords_with_budget(h, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_codewords_with_budget(h: &BitMatrix, budget: usize) -> Result<Vec<Codeword>> {
    let mut out = Vec::new();
    for_each_codeword(h, budget, |c| out.push(c.clone()))?;
    Ok(out)
}

/// Minimum blockwise Hamming weight. `Infinite` marks a code whose only
/// codeword is the zero word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MinBlockWeight {
    Finite(usize),
    Infinite,
}

impl fmt::Display for MinBlockWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinBlockWeight::Finite(w) => write!(f, "{w}"),
            MinBlockWeight::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiversityReport {
    /// Block diversity: fewest nonzero blocks over nonzero codewords.
    pub d: usize,
    /// Minimum blockwise weight ω*.
    pub wstar: MinBlockWeight,
    /// Number of codewords visited (including zero).
    pub codewords: u64,
    /// Minimum Hamming weight over nonzero codewords, if any.
    pub min_distance: Option<usize>,
}

impl DiversityReport {
    pub fn full_diversity(&self) -> bool {
        self.wstar > MinBlockWeight::Finite(0)
    }
}

/// Block diversity and ω* by exhaustive enumeration of the code.
pub fn diversity_analysis(h: &BitMatrix, nc: usize) -> Result<DiversityReport> {
    diversity_analysis_with_budget(h, nc, DEFAULT_ENUMERATION_BUDGET)
}

pub fn diversity_analysis_with_budget(
    h: &BitMatrix,
    nc: usize,
    budget: usize,
) -> Result<DiversityReport> {
    let masks = BlockMasks::new(h.cols(), nc)?;
    let mut d = nc;
    let mut wstar = usize::MAX;
    let mut dmin = usize::MAX;
    let codewords = for_each_codeword(h, budget, |c| {
        if c.is_zero() {
            return;
        }
        let p = masks.profile(c);
        d = d.min(p.active_blocks());
        wstar = wstar.min(p.min_weight());
        dmin = dmin.min(p.total());
    })?;
    Ok(DiversityReport {
        d,
        wstar: if wstar == usize::MAX {
            MinBlockWeight::Infinite
        } else {
            MinBlockWeight::Finite(wstar)
        },
        codewords,
        min_distance: (dmin != usize::MAX).then_some(dmin),
    })
}

/// Blockwise Singleton bound `1 + floor(nc (1 - R))`.
pub fn singleton_bound(rate: f64, nc: usize) -> usize {
    debug_assert!(rate > 0.0 && rate <= 1.0);
    1 + (nc as f64 * (1.0 - rate) + 1e-9).floor() as usize
}

/// Code rate `1 - rank(H)/N`.
pub fn code_rate(h: &BitMatrix) -> f64 {
    1.0 - h.rank() as f64 / h.cols() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming74() -> BitMatrix {
        BitMatrix::from_rows(&[
            [1, 0, 1, 0, 1, 0, 1],
            [0, 1, 1, 0, 0, 1, 1],
            [0, 0, 0, 1, 1, 1, 1],
        ])
        .unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
        assert_eq!(BitMatrix::from_rows(&[[1, 1], [1, 1]]).unwrap().rank(), 1);
    }

    #[test]
    fn rank_does_not_modify_input() {
        let h = hamming74();
        let copy = h.clone();
        assert_eq!(h.rank(), 3);
        assert_eq!(h, copy);
    }

    #[test]
    fn wide_rank_crosses_word_boundary() {
        let n = 150;
        let mut m = BitMatrix::zeros(n, n + 3);
        for i in 0..n {
            m.set(i, i, true);
            m.set(i, i + 3, true);
        }
        assert_eq!(m.rank(), n);
    }

    #[test]
    fn single_parity_check_code() {
        let h = BitMatrix::from_rows(&[[1, 1]]).unwrap();
        let mut words: Vec<Vec<u8>> = enumerate_codewords(&h).unwrap().iter().map(|c| c.bits()).collect();
        words.sort();
        assert_eq!(words, vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn trivial_code_has_only_zero_word() {
        let words = enumerate_codewords(&BitMatrix::identity(2)).unwrap();
        assert_eq!(words.len(), 1);
        assert!(words[0].is_zero());
        let rep = diversity_analysis(&BitMatrix::identity(2), 2).unwrap();
        assert_eq!(rep.d, 2);
        assert_eq!(rep.wstar, MinBlockWeight::Infinite);
    }

    #[test]
    fn hamming_code_brute_force() {
        let h = hamming74();
        let words = enumerate_codewords(&h).unwrap();
        assert_eq!(words.len(), 16);
        let dmin = words.iter().filter(|c| !c.is_zero()).map(|c| c.weight()).min();
        assert_eq!(dmin, Some(3));
        for c in &words {
            assert!(h.is_codeword(c));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let h = BitMatrix::from_rows(&[[1, 1, 1, 1, 1, 1]]).unwrap();
        assert!(matches!(
            enumerate_codewords_with_budget(&h, 4),
            Err(Error::BudgetExceeded { dimension: 5, limit: 4 })
        ));
    }

    #[test]
    fn block_profiles() {
        let p = |s: &[u8]| block_profile(&Codeword::from_bits(s), 2).unwrap().weights;
        assert_eq!(p(&[1, 1, 0, 0, 0, 0, 1, 1]), vec![2, 2]);
        assert_eq!(p(&[0; 8]), vec![0, 0]);
        assert_eq!(p(&[1, 0, 0, 0, 0, 0, 0, 0]), vec![1, 0]);
        assert!(block_profile(&Codeword::zeros(7), 2).is_err());
    }

    #[test]
    fn repetition_code_diversity() {
        let h = BitMatrix::from_rows(&[[1, 1]]).unwrap();
        let rep = diversity_analysis(&h, 2).unwrap();
        assert_eq!(rep.d, 2);
        assert_eq!(rep.wstar, MinBlockWeight::Finite(1));
        assert!(rep.full_diversity());
    }

    #[test]
    fn single_block_codeword_gives_diversity_one() {
        // Only constraint ties bits 0 and 1, both in block 1.
        let h = BitMatrix::from_rows(&[[1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).unwrap();
        let rep = diversity_analysis(&h, 2).unwrap();
        assert_eq!(rep.d, 1);
        assert_eq!(rep.wstar, MinBlockWeight::Finite(0));
    }

    #[test]
    fn singleton_examples() {
        assert_eq!(singleton_bound(0.5, 2), 2);
        assert_eq!(singleton_bound(1.0 / 3.0, 3), 3);
        assert_eq!(singleton_bound(1.0, 2), 1);
    }

    #[test]
    fn kernel_basis_spans_kernel() {
        let h = hamming74();
        let basis = h.kernel_basis();
        assert_eq!(basis.len(), 4);
        for b in &basis {
            assert!(h.is_codeword(b));
        }
    }

    #[test]
    fn product_and_stacking() {
        let a = BitMatrix::from_rows(&[[1, 1], [0, 1]]).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, BitMatrix::identity(2));
        let h = a.hstack(&BitMatrix::identity(2)).unwrap();
        assert_eq!(h.cols(), 4);
        assert_eq!(h.vstack(&h).unwrap().rank(), 2);
    }

    #[test]
    fn four_cycle_count() {
        let h = BitMatrix::from_rows(&[[1, 1, 0], [1, 1, 1]]).unwrap();
        assert_eq!(h.four_cycles(), 1);
        assert_eq!(BitMatrix::identity(3).four_cycles(), 0);
    }
}
