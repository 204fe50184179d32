use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

const PERMUTATION_REDRAWS: usize = 10_000;

/// Square n×n matrix with exactly `w` ones per row and column, built as a
/// sum of `w` disjoint random permutation matrices.
pub fn permutation_sum<R: Rng>(n: usize, w: usize, rng: &mut R) -> Result<BitMatrix> {
    if w > n {
        return Err(Error::Infeasible(format!(
            "weight {w} exceeds matrix size {n}"
        )));
    }
    let mut m = BitMatrix::zeros(n, n);
    let mut perm: Vec<usize> = (0..n).collect();
    for layer in 0..w {
        let mut placed = false;
        for _ in 0..PERMUTATION_REDRAWS {
            perm.shuffle(rng);
            if perm.iter().enumerate().all(|(r, &c)| !m.get(r, c)) {
                for (r, &c) in perm.iter().enumerate() {
                    m.set(r, c, true);
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Infeasible(format!(
                "no permutation disjoint from the first {layer} found for n={n}"
            )));
        }
    }
    Ok(m)
}

/// Randomly wire variable sockets to check sockets without repeated edges.
///
/// `var_sockets[k]` names the variable owning socket k; checks own
/// consecutive runs of sockets given by `check_degrees`. Returns the
/// (check, variable) edge list.
pub fn match_sockets<R: Rng>(
    var_sockets: &[usize],
    check_degrees: &[usize],
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    let total: usize = check_degrees.iter().sum();
    if total != var_sockets.len() {
        return Err(Error::Infeasible(format!(
            "{} variable sockets cannot match {total} check sockets",
            var_sockets.len()
        )));
    }
    let mut owner = Vec::with_capacity(total);
    let mut start = Vec::with_capacity(check_degrees.len());
    for (c, &d) in check_degrees.iter().enumerate() {
        start.push(owner.len());
        owner.extend(std::iter::repeat_n(c, d));
    }
    let mut perm = var_sockets.to_vec();
    perm.shuffle(rng);

    let occurs = |perm: &[usize], check: usize, var: usize, skip: usize| -> bool {
        let s = start[check];
        (s..s + check_degrees[check]).any(|k| k != skip && perm[k] == var)
    };

    let budget = 1000 * total.max(1);
    let mut attempts = 0;
    for k in 0..total {
        while occurs(&perm, owner[k], perm[k], k) {
            attempts += 1;
            if attempts > budget {
                return Err(Error::Infeasible(
                    "could not remove repeated edges from the socket matching".into(),
                ));
            }
            let q = rng.gen_range(0..total);
            if owner[q] == owner[k] {
                continue;
            }
            if occurs(&perm, owner[k], perm[q], k) || occurs(&perm, owner[q], perm[k], q) {
                continue;
            }
            perm.swap(k, q);
        }
    }
    Ok((0..total).map(|k| (owner[k], perm[k])).collect())
}

/// Random (dv, dc)-regular parity-check matrix with N columns.
pub fn random_regular_ldpc(n: usize, dv: usize, dc: usize, seed: u64) -> Result<BitMatrix> {
    if n == 0 || dv == 0 || dc == 0 || !(n * dv).is_multiple_of(dc) {
        return Err(Error::Infeasible(format!(
            "N*dv = {} is not divisible by dc = {dc}",
            n * dv
        )));
    }
    let m = n * dv / dc;
    if dv > m || dc > n {
        return Err(Error::Infeasible(format!(
            "degrees ({dv}, {dc}) too large for {m}x{n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sockets: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, dv)).collect();
    let edges = match_sockets(&sockets, &vec![dc; m], &mut rng)?;
    BitMatrix::from_entries(m, n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_weights() {
        let h = random_regular_ldpc(8, 3, 6, 1).unwrap();
        assert_eq!((h.rows(), h.cols()), (4, 8));
        assert!(h.col_weights().iter().all(|&w| w == 3));
        assert!(h.row_weights().iter().all(|&w| w == 6));
    }

    #[test]
    fn indivisible_is_infeasible() {
        assert!(matches!(random_regular_ldpc(8, 3, 5, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(
            random_regular_ldpc(96, 3, 6, 9).unwrap(),
            random_regular_ldpc(96, 3, 6, 9).unwrap()
        );
        assert_ne!(
            random_regular_ldpc(96, 3, 6, 9).unwrap(),
            random_regular_ldpc(96, 3, 6, 10).unwrap()
        );
    }

    #[test]
    fn permutation_sum_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3, 4, 50] {
            let m = permutation_sum(n, 3, &mut rng).unwrap();
            assert!(m.row_weights().iter().all(|&w| w == 3));
            assert!(m.col_weights().iter().all(|&w| w == 3));
        }
        assert!(permutation_sum(2, 3, &mut rng).is_err());
    }
}
