//! Monte Carlo word-error-rate simulation.
//!
//! Every trial sends the all-zero codeword through a fresh fading draw.
//! Trials are grouped into rounds of fixed-size chunks so the stopping
//! point, and therefore every count, is independent of the worker count.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Code, Decoder, DecoderConfig};
use crate::channel::{sample_fading, zero_word_llr, ChannelConfig};
use crate::error::{Error, Result};
use crate::numeric::wilson_interval;
use crate::sampling::run_chunks;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_trials: u64,
    #[serde(default)]
    pub min_trials: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_errors: 100,
            max_trials: 10_000_000,
            min_trials: 0,
        }
    }
}

/// Which decision errors count as a word error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMetric {
    /// Any information bit wrong.
    #[default]
    Info,
    /// Any bit wrong.
    Word,
    /// Any parity bit wrong.
    Parity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WerPoint {
    pub ebn0_db: f64,
    pub trials: u64,
    pub word_errors: u64,
    pub wer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub avg_iterations: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WerCurve {
    pub points: Vec<WerPoint>,
}

impl WerCurve {
    pub const CSV_HEADER: &'static str = "ebn0_db,trials,word_errors,wer,ci_low,ci_high,avg_iterations";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{:.6e},{:.6e},{:.6e},{:.4}",
                p.ebn0_db, p.trials, p.word_errors, p.wer, p.ci_low, p.ci_high, p.avg_iterations
            )?;
        }
        Ok(())
    }
}

const CHUNKS_PER_ROUND: u64 = 8;
const MIN_CHUNK: u64 = 64;
const MAX_CHUNK: u64 = 1 << 14;
/// Confidence level of reported intervals.
pub const CONFIDENCE: f64 = 0.99;

#[derive(Default)]
struct Tally {
    trials: u64,
    errors: u64,
    iterations: u64,
}

fn run_chunk(
    code: &Code,
    ch: &ChannelConfig,
    dec: &DecoderConfig,
    metric: ErrorMetric,
    trials: u64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Tally> {
    let sigma2 = ch.sigma2();
    let mut decoder = Decoder::new(code, dec);
    let mut llr = vec![0.0; code.n()];
    let mut tally = Tally::default();
    for _ in 0..trials {
        let fading = sample_fading(ch, rng);
        zero_word_llr(&fading, sigma2, ch.es, rng, &mut llr);
        let r = decoder.decode(&llr)?;
        let failed = match metric {
            ErrorMetric::Info => r.info_error,
            ErrorMetric::Word => r.word_error,
            ErrorMetric::Parity => r.parity_error,
        };
        tally.trials += 1;
        tally.errors += failed as u64;
        tally.iterations += r.iterations as u64;
    }
    Ok(tally)
}

/// Simulate one SNR point. `stream` separates the random streams of
/// different points under the same seed.
pub fn simulate_point(
    code: &Code,
    ch: &ChannelConfig,
    dec: &DecoderConfig,
    stop: &StopRule,
    metric: ErrorMetric,
    seed: u64,
    stream: u64,
) -> Result<WerPoint> {
    ch.validate()?;
    dec.validate()?;
    if !code.n().is_multiple_of(ch.nc) {
        return Err(Error::Dimension(format!(
            "length {} is not divisible into {} blocks",
            code.n(),
            ch.nc
        )));
    }
    let point_seed = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut total = Tally::default();
    let mut next_chunk = 0u64;
    let mut round = 0u32;
    loop {
        let done = total.trials >= stop.max_trials
            || (total.errors >= stop.min_errors && total.trials >= stop.min_trials);
        if done {
            break;
        }
        let size = (MIN_CHUNK << round.min(20)).min(MAX_CHUNK);
        let remaining = stop.max_trials - total.trials;
        let chunks = CHUNKS_PER_ROUND.min(remaining.div_ceil(size));
        let last = remaining - (chunks - 1) * size;
        let results = run_chunks(point_seed, next_chunk, chunks, |k, rng| {
            let trials = if k == next_chunk + chunks - 1 { last.min(size) } else { size };
            run_chunk(code, ch, dec, metric, trials, rng)
        });
        for r in results {
            let r = r?;
            total.trials += r.trials;
            total.errors += r.errors;
            total.iterations += r.iterations;
        }
        next_chunk += chunks;
        round += 1;
    }
    let (ci_low, ci_high) = wilson_interval(total.errors, total.trials, CONFIDENCE);
    Ok(WerPoint {
        ebn0_db: ch.ebn0_db,
        trials: total.trials,
        word_errors: total.errors,
        wer: total.errors as f64 / total.trials.max(1) as f64,
        ci_low,
        ci_high,
        avg_iterations: total.iterations as f64 / total.trials.max(1) as f64,
    })
}

/// Simulate a WER curve over `ebn0_list`.
pub fn simulate_wer(
    code: &Code,
    ch: &ChannelConfig,
    dec: &DecoderConfig,
    ebn0_list: &[f64],
    stop: &StopRule,
    metric: ErrorMetric,
    seed: u64,
) -> Result<WerCurve> {
    let points = ebn0_list
        .iter()
        .enumerate()
        .map(|(k, &db)| simulate_point(code, &ch.with_ebn0(db), dec, stop, metric, seed, k as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(WerCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingMode;
    use crate::construct::build_root_regular;
    use crate::decoder::DecoderVariant;

    fn erasure(eps: f64) -> ChannelConfig {
        ChannelConfig {
            mode: FadingMode::Erasure { epsilon: eps },
            ..ChannelConfig::rayleigh(2, 0.5, 0.0)
        }
    }

    #[test]
    fn stop_rule_respects_max_trials() {
        let code = Code::from_root(&build_root_regular(16, 1).unwrap());
        let stop = StopRule { min_errors: u64::MAX, max_trials: 1000, min_trials: 0 };
        let dec = DecoderConfig::with_variant(DecoderVariant::Peeling);
        let p = simulate_point(&code, &erasure(0.3), &dec, &stop, ErrorMetric::Info, 1, 0).unwrap();
        assert_eq!(p.trials, 1000);
    }

    #[test]
    fn erasure_wer_is_eps_squared() {
        let code = Code::from_root(&build_root_regular(40, 1).unwrap());
        let stop = StopRule { min_errors: u64::MAX, max_trials: 20_000, min_trials: 0 };
        let dec = DecoderConfig::with_variant(DecoderVariant::Peeling);
        let p = simulate_point(&code, &erasure(0.3), &dec, &stop, ErrorMetric::Info, 2, 0).unwrap();
        assert!(p.ci_low <= 0.09 && 0.09 <= p.ci_high, "{p:?}");
    }

    #[test]
    fn bp_and_peeling_agree_on_erasures() {
        let code = Code::from_root(&build_root_regular(40, 1).unwrap());
        let stop = StopRule { min_errors: u64::MAX, max_trials: 2_000, min_trials: 0 };
        let a = simulate_point(&code, &erasure(0.4), &DecoderConfig::with_variant(DecoderVariant::Peeling), &stop, ErrorMetric::Info, 3, 0).unwrap();
        let b = simulate_point(&code, &erasure(0.4), &DecoderConfig::default(), &stop, ErrorMetric::Info, 3, 0).unwrap();
        assert_eq!(a.word_errors, b.word_errors);
    }

    #[test]
    fn independent_of_worker_count() {
        let code = Code::from_root(&build_root_regular(40, 1).unwrap());
        let ch = ChannelConfig::rayleigh(2, 0.5, 6.0);
        let stop = StopRule { min_errors: 20, max_trials: 5_000, min_trials: 0 };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_wer(&code, &ch, &DecoderConfig::default(), &[4.0, 8.0], &stop, ErrorMetric::Info, 9).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn csv_layout() {
        let curve = WerCurve {
            points: vec![WerPoint {
                ebn0_db: 1.5,
                trials: 10,
                word_errors: 1,
                wer: 0.1,
                ci_low: 0.01,
                ci_high: 0.4,
                avg_iterations: 2.0,
            }],
        };
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(WerCurve::CSV_HEADER));
        assert_eq!(text.lines().count(), 2);
    }
}
