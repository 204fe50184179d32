//! Root-LDPC codes for two fading blocks.
//!
//! Columns are laid out as four classes of N/4 bits, `[1i | 1p | 2i | 2p]`,
//! and rows as two classes of N/4 checks, `[1c ; 2c]`:
//!
//! ```text
//!        1i    1p    2i    2p
//! 1c  [  I     0    H2i   H2p ]
//! 2c  [ H1i   H1p    I     0  ]
//! ```
//!
//! Every information bit of block 1 (class 1i) owns a rootcheck in 1c whose
//! other neighbours all sit on block 2, so it can be recovered when its own
//! block is erased, and symmetrically for 2i.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::degree::{apportion, DegreeDistribution};
use super::regular::{match_sockets, permutation_sum};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

const CYCLE_RETRIES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColumnClass {
    #[serde(rename = "1i")]
    Info1,
    #[serde(rename = "1p")]
    Parity1,
    #[serde(rename = "2i")]
    Info2,
    #[serde(rename = "2p")]
    Parity2,
}

impl ColumnClass {
    pub const ALL: [ColumnClass; 4] = [
        ColumnClass::Info1,
        ColumnClass::Parity1,
        ColumnClass::Info2,
        ColumnClass::Parity2,
    ];

    pub fn is_info(self) -> bool {
        matches!(self, ColumnClass::Info1 | ColumnClass::Info2)
    }

    /// Fading block (0-based) carrying this class.
    pub fn block(self) -> usize {
        match self {
            ColumnClass::Info1 | ColumnClass::Parity1 => 0,
            ColumnClass::Info2 | ColumnClass::Parity2 => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ColumnClass::Info1 => "1i",
            ColumnClass::Parity1 => "1p",
            ColumnClass::Info2 => "2i",
            ColumnClass::Parity2 => "2p",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckClass {
    #[serde(rename = "1c")]
    Check1,
    #[serde(rename = "2c")]
    Check2,
}

#[derive(Clone, Debug)]
pub struct RootLdpcCode {
    pub h: BitMatrix,
    pub column_class: Vec<ColumnClass>,
    pub check_class: Vec<CheckClass>,
    /// 0-based fading block of each column.
    pub block_of_column: Vec<usize>,
    /// Edge-perspective distribution actually realized by `h`.
    pub realized: DegreeDistribution,
    /// Column pairs sharing two or more checks.
    pub four_cycles: usize,
}

/// Sidecar record written next to an alist export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootMetadata {
    pub n: usize,
    pub checks: usize,
    pub rank: usize,
    pub seed: u64,
    pub four_cycles: usize,
    pub column_class: Vec<ColumnClass>,
    pub check_class: Vec<CheckClass>,
    pub block_of_column: Vec<usize>,
    pub realized: DegreeDistribution,
}

impl RootLdpcCode {
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn quarter(&self) -> usize {
        self.n() / 4
    }

    pub fn class_range(&self, class: ColumnClass) -> Range<usize> {
        let q = self.quarter();
        class.index() * q..(class.index() + 1) * q
    }

    /// Columns of classes 1i and 2i.
    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.n()).filter(|&c| self.column_class[c].is_info()).collect()
    }

    pub fn metadata(&self, seed: u64) -> RootMetadata {
        RootMetadata {
            n: self.n(),
            checks: self.h.rows(),
            rank: self.h.rank(),
            seed,
            four_cycles: self.four_cycles,
            column_class: self.column_class.clone(),
            check_class: self.check_class.clone(),
            block_of_column: self.block_of_column.clone(),
            realized: self.realized.clone(),
        }
    }

    fn assemble(q: usize, non_root: &[(usize, usize)]) -> Result<Self> {
        let n = 4 * q;
        let roots = (0..q).flat_map(|r| [(r, r), (q + r, 2 * q + r)]);
        let h = BitMatrix::from_entries(2 * q, n, roots.chain(non_root.iter().copied()))?;
        let column_class: Vec<ColumnClass> = (0..n).map(|c| ColumnClass::ALL[c / q]).collect();
        let check_class = (0..2 * q)
            .map(|r| if r < q { CheckClass::Check1 } else { CheckClass::Check2 })
            .collect();
        let block_of_column = column_class.iter().map(|c| c.block()).collect();
        let realized = DegreeDistribution::from_node_degrees(&h.col_weights(), &h.row_weights());
        let four_cycles = h.four_cycles();
        Ok(RootLdpcCode {
            h,
            column_class,
            check_class,
            block_of_column,
            realized,
            four_cycles,
        })
    }
}

fn check_length(n: usize) -> Result<usize> {
    if !n.is_multiple_of(4) || n < 12 {
        return Err(Error::Dimension(format!(
            "root codes need N divisible by 4 and at least 12, got {n}"
        )));
    }
    Ok(n / 4)
}

/// Keep the candidate with the fewest 4-cycles over a few draws.
fn fewest_cycles(
    mut draw: impl FnMut() -> Result<RootLdpcCode>,
) -> Result<RootLdpcCode> {
    let mut best = draw()?;
    for _ in 1..CYCLE_RETRIES {
        if best.four_cycles == 0 {
            break;
        }
        let next = draw()?;
        if next.four_cycles < best.four_cycles {
            best = next;
        }
    }
    if best.four_cycles > 0 {
        log::warn!(
            "root code of length {} keeps {} four-cycles after {CYCLE_RETRIES} draws",
            best.n(),
            best.four_cycles
        );
    }
    Ok(best)
}

/// Regular (3,6) root-LDPC code: H1i, H2i have weight 2 per row and column,
/// H1p, H2p weight 3.
pub fn build_root_regular(n: usize, seed: u64) -> Result<RootLdpcCode> {
    let q = check_length(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fewest_cycles(|| {
        let mut edges = Vec::with_capacity(5 * 2 * q);
        // (row offset, column offset, weight) for H2i, H2p, H1i, H1p.
        for (r0, c0, w) in [(0, 2 * q, 2), (0, 3 * q, 3), (q, 0, 2), (q, q, 3)] {
            let m = permutation_sum(q, w, &mut rng)?;
            for r in 0..q {
                edges.extend(m.row_ones(r).into_iter().map(|c| (r0 + r, c0 + c)));
            }
        }
        RootLdpcCode::assemble(q, &edges)
    })
}

/// Spread `count` nodes over degrees with node-perspective fractions.
fn degree_sequence(fractions: &[(usize, f64)], count: usize) -> Vec<usize> {
    let weights: Vec<f64> = fractions.iter().map(|p| p.1).collect();
    apportion(&weights, count)
        .into_iter()
        .zip(fractions)
        .flat_map(|(k, &(d, _))| std::iter::repeat_n(d, k))
        .collect()
}

/// Nudge check socket counts by ±1 until they total `target`.
fn balance_sockets(sockets: &mut [usize], target: usize) -> Result<()> {
    let mut order: Vec<usize> = (0..sockets.len()).collect();
    let mut total: usize = sockets.iter().sum();
    if total < target {
        order.sort_by_key(|&i| (sockets[i], i));
    } else {
        order.sort_by_key(|&i| (std::cmp::Reverse(sockets[i]), i));
    }
    let mut k = 0;
    let mut stalled = 0;
    while total != target {
        let i = order[k % order.len()];
        k += 1;
        if total < target {
            sockets[i] += 1;
            total += 1;
            stalled = 0;
        } else if sockets[i] > 1 {
            sockets[i] -= 1;
            total -= 1;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > order.len() {
                return Err(Error::DegreeDistribution(
                    "check sockets cannot be balanced".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Irregular root-LDPC code. Variable and check degrees follow the node
/// perspective of `dd` in every class; rootcheck edges count towards the
/// degree of the information bit and of its rootcheck.
pub fn build_root_irregular(
    n: usize,
    dd: &DegreeDistribution,
    seed: u64,
) -> Result<RootLdpcCode> {
    let q = check_length(n)?;
    dd.validate()?;
    dd.require_min_degree_two()?;
    let var_degrees = degree_sequence(&dd.variable_node_fractions(), q);
    let check_degrees = degree_sequence(&dd.check_node_fractions(), q);

    // Non-root sockets of one block's bits and the other block's checks.
    let mut var_sockets = Vec::new();
    for (k, &d) in var_degrees.iter().enumerate() {
        var_sockets.extend(std::iter::repeat_n(k, d - 1));
    }
    for (k, &d) in var_degrees.iter().enumerate() {
        var_sockets.extend(std::iter::repeat_n(q + k, d));
    }
    let mut check_sockets: Vec<usize> = check_degrees.iter().map(|d| d - 1).collect();
    balance_sockets(&mut check_sockets, var_sockets.len())?;
    if check_sockets.iter().any(|&s| s > 2 * q) {
        return Err(Error::DegreeDistribution(format!(
            "check degree exceeds the {} available bits",
            2 * q
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fewest_cycles(|| {
        let mut edges = Vec::with_capacity(2 * var_sockets.len());
        // Block-1 bits feed 2c rows; block-2 bits feed 1c rows.
        for (row0, col0) in [(q, 0), (0, 2 * q)] {
            let matched = match_sockets(&var_sockets, &check_sockets, &mut rng)
                .map_err(|e| Error::DegreeDistribution(e.to_string()))?;
            edges.extend(matched.into_iter().map(|(r, c)| (row0 + r, col0 + c)));
        }
        // Burn one draw so successive attempts differ even for tiny codes.
        let _: u64 = rng.gen();
        RootLdpcCode::assemble(q, &edges)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub_is_identity(h: &BitMatrix, r0: usize, c0: usize, q: usize) -> bool {
        (0..q).all(|r| (0..q).all(|c| h.get(r0 + r, c0 + c) == (r == c)))
    }

    fn sub_is_zero(h: &BitMatrix, r0: usize, c0: usize, q: usize) -> bool {
        (0..q).all(|r| (0..q).all(|c| !h.get(r0 + r, c0 + c)))
    }

    fn check_structure(code: &RootLdpcCode) {
        let q = code.quarter();
        let h = &code.h;
        assert!(sub_is_identity(h, 0, 0, q));
        assert!(sub_is_identity(h, q, 2 * q, q));
        assert!(sub_is_zero(h, 0, q, q));
        assert!(sub_is_zero(h, q, 3 * q, q));
        let edges_by_col: usize = h.col_weights().iter().sum();
        let edges_by_row: usize = h.row_weights().iter().sum();
        assert_eq!(edges_by_col, edges_by_row);
        for class in ColumnClass::ALL {
            assert_eq!(code.class_range(class).len(), q);
        }
    }

    #[test]
    fn regular_root_structure() {
        let code = build_root_regular(16, 7).unwrap();
        check_structure(&code);
        assert!(code.h.col_weights().iter().all(|&w| w == 3));
        assert!(code.h.row_weights().iter().all(|&w| w == 6));
        assert_eq!(code.realized, DegreeDistribution::regular(3, 6));
    }

    #[test]
    fn classes_and_blocks() {
        let code = build_root_regular(16, 1).unwrap();
        assert_eq!(code.column_class[0], ColumnClass::Info1);
        assert_eq!(code.column_class[4], ColumnClass::Parity1);
        assert_eq!(code.column_class[8], ColumnClass::Info2);
        assert_eq!(code.column_class[15], ColumnClass::Parity2);
        assert_eq!(code.block_of_column[..8], [0; 8]);
        assert_eq!(code.block_of_column[8..], [1; 8]);
        assert_eq!(code.info_positions(), (0..4).chain(8..12).collect::<Vec<_>>());
    }

    #[test]
    fn bad_length() {
        assert!(build_root_regular(18, 0).is_err());
        assert!(build_root_regular(8, 0).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let a = build_root_regular(40, 3).unwrap();
        let b = build_root_regular(40, 3).unwrap();
        assert_eq!(a.h, b.h);
    }

    #[test]
    fn irregular_with_regular_distribution() {
        let code = build_root_irregular(40, &DegreeDistribution::regular(3, 6), 5).unwrap();
        check_structure(&code);
        assert!(code.h.col_weights().iter().all(|&w| w == 3));
        assert!(code.h.row_weights().iter().all(|&w| w == 6));
    }

    #[test]
    fn irregular_realizes_node_counts() {
        let dd = DegreeDistribution::irregular_rate_half();
        let code = build_root_irregular(4000, &dd, 11).unwrap();
        check_structure(&code);
        let q = code.quarter();
        let weights = code.h.col_weights();
        for class in ColumnClass::ALL {
            let cols = &weights[code.class_range(class)];
            for &(d, frac) in &dd.variable_node_fractions() {
                let have = cols.iter().filter(|&&w| w == d).count() as f64;
                assert!((have - frac * q as f64).abs() < 1.0, "degree {d} in {class:?}");
            }
        }
    }
}
