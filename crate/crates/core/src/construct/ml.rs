//! Full-diversity codes designed for maximum-likelihood decoding.
//!
//! Full diversity under ML decoding reduces to a rank condition: no nonzero
//! codeword may vanish on a fading block, so the columns of every union of
//! `nc - 1` blocks must be linearly independent.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Rank criterion for full diversity on `nc` ∈ {2, 3} equal fading blocks.
pub fn is_ml_full_diversity(h: &BitMatrix, nc: usize) -> Result<bool> {
    if nc != 2 && nc != 3 {
        return Err(Error::UnsupportedBlockCount(nc));
    }
    if !h.cols().is_multiple_of(nc) {
        return Err(Error::Dimension(format!(
            "{} columns do not split into {nc} blocks",
            h.cols()
        )));
    }
    let ell = h.cols() / nc;
    for skipped in 0..nc {
        let cols: Vec<usize> = (0..h.cols()).filter(|c| c / ell != skipped).collect();
        if h.select_columns(&cols).rank() < cols.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rate 1/2 − 1/N code with ω* = 2: `[A | I]` over a row of ones on the
/// left half, where A has a zero first column and columns e_{j−1} + e_j.
pub fn build_wstar2(n: usize) -> Result<BitMatrix> {
    if n < 8 || !n.is_multiple_of(2) {
        return Err(Error::Dimension(format!("N = {n} must be even and at least 8")));
    }
    let half = n / 2;
    let mut h = BitMatrix::zeros(half + 1, n);
    for j in 1..half {
        h.set(j - 1, j, true);
        h.set(j, j, true);
    }
    for i in 0..half {
        h.set(i, half + i, true);
        h.set(half, i, true);
    }
    Ok(h)
}

/// Parity-check matrix of the [2^m − 1, 2^m − 1 − m] Hamming code.
pub fn hamming_parity_check(m: usize) -> BitMatrix {
    let n = (1usize << m) - 1;
    let mut h = BitMatrix::zeros(m, n);
    for c in 0..n {
        for r in 0..m {
            if ((c + 1) >> r) & 1 == 1 {
                h.set(r, c, true);
            }
        }
    }
    h
}

fn permutation_matrix(perm: &[usize]) -> BitMatrix {
    let mut p = BitMatrix::zeros(perm.len(), perm.len());
    for (r, &c) in perm.iter().enumerate() {
        p.set(r, c, true);
    }
    p
}

/// Code of length N = 2(2^m − 1) with ω* ≥ 3: the base `[P | I]` ties the
/// halves by a permutation P, and a Hamming check on each half forces every
/// nonzero half to weight three or more.
///
/// P is drawn from a fixed seed sequence until the stacked matrix has full
/// rank, which requires P not to preserve the Hamming code.
pub fn build_wstar3(m: usize) -> Result<BitMatrix> {
    if !(3..=10).contains(&m) {
        return Err(Error::Dimension(format!("m = {m} must lie in 3..=10")));
    }
    let n = (1usize << m) - 1;
    let ham = hamming_parity_check(m);
    let mut perm: Vec<usize> = (0..n).collect();
    for seed in 0..10_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        perm.shuffle(&mut rng);
        let base = permutation_matrix(&perm).hstack(&BitMatrix::identity(n))?;
        let mut h = BitMatrix::zeros(n + 2 * m, 2 * n);
        h.place(0, 0, &base);
        h.place(n, 0, &ham);
        h.place(n + m, n, &ham);
        if h.rank() == n + 2 * m {
            return Ok(h);
        }
    }
    Err(Error::Infeasible(format!(
        "no full-rank permutation found for m = {m}"
    )))
}

/// Dense random (N/2)×N matrix whose two halves are both invertible.
pub fn build_random_full_diversity(n: usize, seed: u64) -> Result<BitMatrix> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Dimension(format!("N = {n} must be even")));
    }
    let half = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let mut h = BitMatrix::zeros(half, n);
        for r in 0..half {
            for c in 0..n {
                if rng.gen::<bool>() {
                    h.set(r, c, true);
                }
            }
        }
        if is_ml_full_diversity(&h, 2)? {
            return Ok(h);
        }
    }
    Err(Error::Infeasible("no full-rank halves found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{code_rate, diversity_analysis, MinBlockWeight};

    #[test]
    fn identity_pair_is_full_diversity() {
        let i = BitMatrix::identity(5);
        assert!(is_ml_full_diversity(&i.hstack(&i).unwrap(), 2).unwrap());
    }

    #[test]
    fn zero_column_breaks_full_diversity() {
        let mut h = BitMatrix::identity(4).hstack(&BitMatrix::identity(4)).unwrap();
        h.set(0, 0, false);
        assert!(!is_ml_full_diversity(&h, 2).unwrap());
    }

    #[test]
    fn unsupported_block_count() {
        let h = BitMatrix::identity(4);
        assert!(matches!(is_ml_full_diversity(&h, 4), Err(Error::UnsupportedBlockCount(4))));
    }

    #[test]
    fn wstar2_shape_and_rank() {
        let h = build_wstar2(12).unwrap();
        assert_eq!((h.rows(), h.cols()), (7, 12));
        assert_eq!(h.rank(), 7);
        assert!((code_rate(&h) - (0.5 - 1.0 / 12.0)).abs() < 1e-12);
        assert!(build_wstar2(7).is_err());
        assert!(build_wstar2(6).is_err());
    }

    #[test]
    fn wstar2_diversity() {
        let rep = diversity_analysis(&build_wstar2(12).unwrap(), 2).unwrap();
        assert_eq!(rep.wstar, MinBlockWeight::Finite(2));
        assert_eq!(rep.d, 2);
    }

    #[test]
    fn wstar3_rate_and_weight() {
        let h = build_wstar3(3).unwrap();
        assert_eq!(h.cols(), 14);
        assert!((code_rate(&h) - (0.5 - 3.0 / 7.0)).abs() < 1e-12);
        let rep = diversity_analysis(&h, 2).unwrap();
        assert!(rep.wstar >= MinBlockWeight::Finite(3));
    }

    #[test]
    fn hamming_code_has_distance_three() {
        let h = hamming_parity_check(3);
        let rep = diversity_analysis(&h, 1).unwrap();
        assert_eq!(rep.min_distance, Some(3));
    }
}
