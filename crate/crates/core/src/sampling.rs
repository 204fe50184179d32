//! Reproducible parallel Monte Carlo.
//!
//! Work is cut into fixed-size chunks; chunk `k` draws from a ChaCha8
//! stream selected by `k` under the master seed. Results therefore depend
//! only on the seed and chunk layout, never on the number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Run chunks `first..first + count` in parallel, returning results in
/// chunk order.
pub fn run_chunks<T, F>(seed: u64, first: u64, count: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (first..first + count)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k);
            work(k, &mut rng)
        })
        .collect()
}

/// Sizes of the chunks covering `total` trials with at most `chunk` each.
pub fn chunk_sizes(total: u64, chunk: u64) -> impl Iterator<Item = u64> {
    let full = total / chunk;
    let rest = total % chunk;
    std::iter::repeat_n(chunk, full as usize)
        .chain((rest > 0).then_some(rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = chunk_rng(1, 0).gen();
        let b: u64 = chunk_rng(1, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, chunk_rng(1, 0).gen::<u64>());
    }

    #[test]
    fn worker_count_does_not_matter() {
        let draw = |_: u64, rng: &mut ChaCha8Rng| rng.gen::<u32>();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_chunks(5, 0, 16, draw));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_chunks(5, 0, 16, draw));
        assert_eq!(one, four);
    }

    #[test]
    fn chunk_sizes_cover_total() {
        assert_eq!(chunk_sizes(10, 4).collect::<Vec<_>>(), vec![4, 4, 2]);
        assert_eq!(chunk_sizes(8, 4).collect::<Vec<_>>(), vec![4, 4]);
    }
}
