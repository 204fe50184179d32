//! Block-fading BPSK channel.
//!
//! A codeword of length N is split into `nc` blocks of ℓ = N/nc symbols and
//! symbol i of block j is received as `y_i = α_j x_i + z_i` with bit 0 sent
//! as `+√Es`. Noise is Gaussian with variance σ² = N0/2, where N0 = Es/γ and
//! γ = R·Eb/N0. Receivers know α exactly.
//!
//! An infinite gain (`f64::INFINITY`) marks a perfectly clean block and an
//! erased block has gain 0; both appear in the block-erasure channel.

use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Codeword;
use crate::numeric::{self, db_to_linear, softplus, wilson_interval};
use crate::sampling::{chunk_sizes, run_chunks};

/// Channel LLR magnitude clip.
pub const LLR_MAX: f64 = 50.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FadingMode {
    Rayleigh,
    Erasure { epsilon: f64 },
    Fixed { alpha: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub nc: usize,
    pub rate: f64,
    pub ebn0_db: f64,
    pub mode: FadingMode,
    #[serde(default = "default_es")]
    pub es: f64,
}

fn default_es() -> f64 {
    1.0
}

impl ChannelConfig {
    pub fn rayleigh(nc: usize, rate: f64, ebn0_db: f64) -> Self {
        ChannelConfig {
            nc,
            rate,
            ebn0_db,
            mode: FadingMode::Rayleigh,
            es: 1.0,
        }
    }

    pub fn with_ebn0(&self, ebn0_db: f64) -> Self {
        ChannelConfig {
            ebn0_db,
            ..self.clone()
        }
    }

    /// Average SNR per symbol γ = R·Eb/N0 (linear).
    pub fn gamma(&self) -> f64 {
        self.rate * db_to_linear(self.ebn0_db)
    }

    pub fn n0(&self) -> f64 {
        self.es / self.gamma()
    }

    pub fn sigma2(&self) -> f64 {
        self.n0() / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.nc == 0 {
            return Err(Error::Config("nc must be at least 1".into()));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::Config(format!("rate {} outside (0, 1]", self.rate)));
        }
        if !(self.es > 0.0) {
            return Err(Error::Config("es must be positive".into()));
        }
        match &self.mode {
            FadingMode::Erasure { epsilon } if !(0.0..=1.0).contains(epsilon) => {
                Err(Error::Config(format!("erasure probability {epsilon} outside [0, 1]")))
            }
            FadingMode::Fixed { alpha } if alpha.len() != self.nc => Err(Error::Config(format!(
                "{} fixed gains for {} blocks",
                alpha.len(),
                self.nc
            ))),
            FadingMode::Fixed { alpha } if alpha.iter().any(|a| !(*a >= 0.0)) => {
                Err(Error::Config("fixed gains must be nonnegative".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FadingRealization {
    pub alpha: Vec<f64>,
}

impl FadingRealization {
    pub fn new(alpha: Vec<f64>) -> Self {
        FadingRealization { alpha }
    }

    pub fn nc(&self) -> usize {
        self.alpha.len()
    }
}

#[derive(Clone, Debug)]
pub struct ReceivedWord {
    pub y: Vec<f64>,
    pub fading: FadingRealization,
    pub sigma2: f64,
    pub es: f64,
}

/// Unit-mean exponential draw for α².
#[inline]
pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

pub fn sample_fading<R: Rng + ?Sized>(cfg: &ChannelConfig, rng: &mut R) -> FadingRealization {
    let alpha = match &cfg.mode {
        FadingMode::Rayleigh => (0..cfg.nc).map(|_| sample_exponential(rng).sqrt()).collect(),
        FadingMode::Erasure { epsilon } => (0..cfg.nc)
            .map(|_| if rng.gen::<f64>() < *epsilon { 0.0 } else { f64::INFINITY })
            .collect(),
        FadingMode::Fixed { alpha } => alpha.clone(),
    };
    FadingRealization { alpha }
}

fn block_len(n: usize, nc: usize) -> Result<usize> {
    if nc == 0 || !n.is_multiple_of(nc) {
        return Err(Error::Dimension(format!(
            "length {n} is not divisible into {nc} blocks"
        )));
    }
    Ok(n / nc)
}

/// Send a codeword through the channel. Symbols on infinite-gain blocks are
/// delivered noiselessly.
pub fn transmit<R: Rng + ?Sized>(
    c: &Codeword,
    fading: &FadingRealization,
    sigma2: f64,
    es: f64,
    rng: &mut R,
) -> Result<ReceivedWord> {
    let ell = block_len(c.len(), fading.nc())?;
    let amp = es.sqrt();
    let sigma = sigma2.sqrt();
    let y = (0..c.len())
        .map(|i| {
            let x = if c.bit(i) { -amp } else { amp };
            let a = fading.alpha[i / ell];
            if a.is_infinite() {
                x
            } else {
                let z: f64 = rng.sample(StandardNormal);
                a * x + sigma * z
            }
        })
        .collect();
    Ok(ReceivedWord {
        y,
        fading: fading.clone(),
        sigma2,
        es,
    })
}

#[inline]
fn clip(x: f64) -> f64 {
    x.clamp(-LLR_MAX, LLR_MAX)
}

/// Channel LLRs `2 α y √Es / σ²`, clipped to ±`LLR_MAX`.
pub fn channel_llr(w: &ReceivedWord) -> Result<Vec<f64>> {
    let ell = block_len(w.y.len(), w.fading.nc())?;
    let amp = w.es.sqrt();
    Ok(w.y
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let a = w.fading.alpha[i / ell];
            if a == 0.0 {
                0.0
            } else if a.is_infinite() {
                if y > 0.0 {
                    LLR_MAX
                } else if y < 0.0 {
                    -LLR_MAX
                } else {
                    0.0
                }
            } else {
                clip(2.0 * a * amp * y / w.sigma2)
            }
        })
        .collect())
}

/// Fill `out` with channel LLRs for the all-zero codeword, without building
/// the intermediate received word.
pub fn zero_word_llr<R: Rng + ?Sized>(
    fading: &FadingRealization,
    sigma2: f64,
    es: f64,
    rng: &mut R,
    out: &mut [f64],
) {
    let ell = out.len() / fading.nc();
    let amp = es.sqrt();
    let sigma = sigma2.sqrt();
    for (j, chunk) in out.chunks_mut(ell).enumerate() {
        let a = fading.alpha[j];
        if a == 0.0 {
            chunk.fill(0.0);
        } else if a.is_infinite() {
            chunk.fill(LLR_MAX);
        } else {
            let scale = 2.0 * a * amp / sigma2;
            for v in chunk.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v = clip(scale * (a * amp + sigma * z));
            }
        }
    }
}

/// Mutual information of binary-input AWGN at symbol SNR `s`, in bits.
///
/// With unit-energy BPSK the LLR is L = 4s + √(8s)·Z for standard normal Z
/// and I = 1 − E[log2(1 + e^{−L})]. The expectation is integrated over Z
/// adaptively, split where L changes sign.
pub fn bpsk_awgn_mi(s: f64) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    if s.is_infinite() || s > 1e4 {
        return 1.0;
    }
    const Z_MAX: f64 = 12.0;
    let mean = 4.0 * s;
    let scale = (8.0 * s).sqrt();
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let f = |z: f64| norm * (-0.5 * z * z).exp() * softplus(-(mean + scale * z));
    let z0 = -mean / scale;
    let expect = if z0 > -Z_MAX {
        numeric::integrate(f, -Z_MAX, z0, 1e-14).and_then(|a| {
            numeric::integrate(f, z0, Z_MAX, 1e-14).map(|b| a + b)
        })
    } else {
        numeric::integrate(f, -Z_MAX, Z_MAX, 1e-14)
    }
    .expect("smooth integrand converges");
    (1.0 - expect / std::f64::consts::LN_2).clamp(0.0, 1.0)
}

const TABLE_LOG_MIN: f64 = -20.0;
const TABLE_LOG_MAX: f64 = 7.5;
const TABLE_POINTS: usize = 8192;

fn mi_table() -> &'static Vec<f64> {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = (TABLE_LOG_MAX - TABLE_LOG_MIN) / (TABLE_POINTS - 1) as f64;
        (0..TABLE_POINTS)
            .map(|k| bpsk_awgn_mi((TABLE_LOG_MIN + k as f64 * h).exp()))
            .collect()
    })
}

/// Table-driven [`bpsk_awgn_mi`] for Monte Carlo loops: cubic interpolation
/// in log s, accurate to about 1e-10.
pub fn bpsk_awgn_mi_fast(s: f64) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let t = s.ln();
    if t <= TABLE_LOG_MIN || t >= TABLE_LOG_MAX {
        return bpsk_awgn_mi(s);
    }
    let table = mi_table();
    let h = (TABLE_LOG_MAX - TABLE_LOG_MIN) / (TABLE_POINTS - 1) as f64;
    let pos = (t - TABLE_LOG_MIN) / h;
    let k = (pos.floor() as usize).clamp(1, TABLE_POINTS - 3);
    let u = pos - k as f64;
    let (p0, p1, p2, p3) = (table[k - 1], table[k], table[k + 1], table[k + 2]);
    // Four-point Lagrange interpolation on nodes -1, 0, 1, 2.
    let v = -p0 * u * (u - 1.0) * (u - 2.0) / 6.0 + p1 * (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0
        - p2 * (u + 1.0) * u * (u - 2.0) / 2.0
        + p3 * (u + 1.0) * u * (u - 1.0) / 6.0;
    v.clamp(0.0, 1.0)
}

/// Symbol SNR at which the mutual information reaches `target` ∈ (0, 1).
pub fn inverse_mi(target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Numerical(format!("mutual information {target} outside (0, 1)")));
    }
    let t = numeric::bisect(|ls| bpsk_awgn_mi(ls.exp()) - target, -40.0, 8.0, 1e-13)?;
    Ok(t.exp())
}

/// Eb/N0 (dB) at which a rate-R code meets the BPSK capacity limit.
pub fn capacity_ebn0_db(rate: f64) -> Result<f64> {
    let s = inverse_mi(rate)?;
    Ok(numeric::linear_to_db(s / rate))
}

/// Mean per-block mutual information at average SNR `gamma`.
pub fn instantaneous_mi(gamma: f64, fading: &FadingRealization) -> f64 {
    let sum: f64 = fading
        .alpha
        .iter()
        .map(|&a| if a.is_infinite() { 1.0 } else { bpsk_awgn_mi(gamma * a * a) })
        .sum();
    sum / fading.nc() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub p_out: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub outages: u64,
    pub samples: u64,
}

const OUTAGE_CHUNK: u64 = 1 << 16;

/// Monte Carlo estimate of Pr{I(γ, α) < R} under Rayleigh fading with a 99%
/// Wilson interval.
pub fn outage_probability(gamma: f64, rate: f64, nc: usize, samples: u64, seed: u64) -> OutageEstimate {
    let sizes: Vec<u64> = chunk_sizes(samples, OUTAGE_CHUNK).collect();
    let threshold = rate * nc as f64;
    let counts = run_chunks(seed, 0, sizes.len() as u64, |k, rng| {
        let mut hits = 0u64;
        for _ in 0..sizes[k as usize] {
            let total: f64 = (0..nc)
                .map(|_| bpsk_awgn_mi_fast(gamma * sample_exponential(rng)))
                .sum();
            if total < threshold {
                hits += 1;
            }
        }
        hits
    });
    let outages: u64 = counts.iter().sum();
    let (ci_low, ci_high) = wilson_interval(outages, samples, 0.99);
    OutageEstimate {
        p_out: outages as f64 / samples.max(1) as f64,
        ci_low,
        ci_high,
        outages,
        samples,
    }
}

/// Outage probability of the block-erasure channel with `nc` blocks: the
/// fraction of erased blocks must not exceed 1 − R.
pub fn erasure_outage(epsilon: f64, rate: f64, nc: usize) -> f64 {
    let mut p = 0.0;
    for erased in 0..=nc {
        let mi = (nc - erased) as f64 / nc as f64;
        if mi < rate {
            let ways = binomial(nc, erased);
            p += ways * epsilon.powi(erased as i32) * (1.0 - epsilon).powi((nc - erased) as i32);
        }
    }
    p
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Deterministic outage probability for two Rayleigh blocks:
/// P = ∫ e^{−u} (1 − e^{−b(u)}) du with I(γ b(u)) = 2R − I(γ u).
pub fn outage_quadrature_nc2(gamma: f64, rate: f64) -> Result<f64> {
    let target = 2.0 * rate;
    let inner = |u: f64| -> f64 {
        let rest = target - bpsk_awgn_mi(gamma * u);
        if rest <= 0.0 {
            return 0.0;
        }
        if rest >= 1.0 {
            return (-u).exp();
        }
        match inverse_mi(rest) {
            Ok(s) => (-u).exp() * -(-s / gamma).exp_m1(),
            Err(_) => 0.0,
        }
    };
    if target < 1.0 {
        let upper = inverse_mi(target)? / gamma;
        numeric::integrate(inner, 0.0, upper, 1e-12)
    } else {
        numeric::integrate_to_infinity(inner, 0.0, 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    #[test]
    fn fixed_fading_is_returned() {
        let cfg = ChannelConfig {
            mode: FadingMode::Fixed { alpha: vec![1.0, 1.0] },
            ..ChannelConfig::rayleigh(2, 0.5, 3.0)
        };
        assert_eq!(sample_fading(&cfg, &mut rng()).alpha, vec![1.0, 1.0]);
    }

    #[test]
    fn erasure_frequency() {
        let cfg = ChannelConfig {
            mode: FadingMode::Erasure { epsilon: 0.3 },
            ..ChannelConfig::rayleigh(1, 0.5, 3.0)
        };
        let mut r = rng();
        let n = 100_000;
        let zeros = (0..n).filter(|_| sample_fading(&cfg, &mut r).alpha[0] == 0.0).count();
        let p = zeros as f64 / n as f64;
        let sd = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((p - 0.3).abs() < 3.0 * sd, "{p}");
    }

    #[test]
    fn rayleigh_power_is_unit_mean() {
        let cfg = ChannelConfig::rayleigh(1, 0.5, 3.0);
        let mut r = rng();
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| sample_fading(&cfg, &mut r).alpha[0].powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn noiseless_transmission() {
        let c = Codeword::zeros(4);
        let w = transmit(&c, &FadingRealization::new(vec![2.0, 1.0]), 0.0, 1.0, &mut rng()).unwrap();
        assert_eq!(w.y, vec![2.0, 2.0, 1.0, 1.0]);
        let c = Codeword::from_bits(&[1, 0]);
        let w = transmit(&c, &FadingRealization::new(vec![1.0, 1.0]), 0.0, 1.0, &mut rng()).unwrap();
        assert_eq!(w.y, vec![-1.0, 1.0]);
    }

    #[test]
    fn erased_block_is_pure_noise() {
        let c = Codeword::zeros(2);
        let mut a = rng();
        let w = transmit(&c, &FadingRealization::new(vec![0.0, 0.0]), 1.0, 1.0, &mut a).unwrap();
        let mut b = rng();
        let z0: f64 = b.sample(StandardNormal);
        assert_eq!(w.y[0], z0);
    }

    #[test]
    fn llr_formula() {
        let w = ReceivedWord {
            y: vec![0.25, 1.0],
            fading: FadingRealization::new(vec![1.0]),
            sigma2: 0.5,
            es: 1.0,
        };
        assert_eq!(channel_llr(&w).unwrap(), vec![1.0, 4.0]);
        let w = ReceivedWord {
            y: vec![3.0, -1.0],
            fading: FadingRealization::new(vec![0.0, f64::INFINITY]),
            sigma2: 0.5,
            es: 1.0,
        };
        assert_eq!(channel_llr(&w).unwrap(), vec![0.0, -LLR_MAX]);
    }

    #[test]
    fn noiseless_llr_sign_matches_symbol() {
        let c = Codeword::from_bits(&[1, 0, 1, 1]);
        let w = transmit(&c, &FadingRealization::new(vec![0.7, 1.3]), 0.0, 1.0, &mut rng()).unwrap();
        let w = ReceivedWord { sigma2: 0.1, ..w };
        for (i, l) in channel_llr(&w).unwrap().into_iter().enumerate() {
            assert_eq!(l < 0.0, c.bit(i));
        }
    }

    fn mi_oracle(s: f64) -> f64 {
        let sd = (8.0 * s).sqrt();
        let mean = 4.0 * s;
        let density = |l: f64| (-(l - mean).powi(2) / (2.0 * sd * sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
        let e = numeric::integrate(
            |l| density(l) * softplus(-l) / std::f64::consts::LN_2,
            mean - 40.0 * sd,
            mean + 40.0 * sd,
            1e-13,
        )
        .unwrap();
        1.0 - e
    }

    #[test]
    fn mi_matches_adaptive_quadrature() {
        for s in [1e-4, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            let a = bpsk_awgn_mi(s);
            let b = mi_oracle(s);
            assert!((a - b).abs() < 1e-9, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn mi_reference_values() {
        // 30-digit values from arbitrary-precision quadrature.
        for (s, want) in [
            (0.5, 0.485_944_154_132_935_3),
            (1.0, 0.721_451_590_790_388_1),
            (2.0, 0.912_822_285_774_482_2),
            (5.0, 0.996_756_327_990_029_7),
        ] {
            assert!((bpsk_awgn_mi(s) - want).abs() < 1e-11, "s={s}");
        }
    }

    #[test]
    fn mi_limits_and_monotonicity() {
        assert_eq!(bpsk_awgn_mi(0.0), 0.0);
        assert!((bpsk_awgn_mi(100.0) - 1.0).abs() < 1e-6);
        let mut prev = 0.0;
        for k in 0..200 {
            let v = bpsk_awgn_mi(10f64.powf(-3.0 + k as f64 * 0.03));
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn fast_mi_matches_direct() {
        for k in 0..500 {
            let s = 10f64.powf(-6.0 + k as f64 * 0.019);
            assert!((bpsk_awgn_mi_fast(s) - bpsk_awgn_mi(s)).abs() < 1e-9, "s={s}");
        }
    }

    #[test]
    fn half_rate_capacity() {
        let db = capacity_ebn0_db(0.5).unwrap();
        assert!((db - 0.187).abs() < 0.002, "{db}");
    }

    #[test]
    fn instantaneous_mi_cases() {
        let g = 3.0;
        assert!((instantaneous_mi(g, &FadingRealization::new(vec![1.0, 1.0])) - bpsk_awgn_mi(g)).abs() < 1e-15);
        assert_eq!(instantaneous_mi(g, &FadingRealization::new(vec![0.0, 0.0])), 0.0);
        assert_eq!(instantaneous_mi(g, &FadingRealization::new(vec![0.0, f64::INFINITY])), 0.5);
        let a = instantaneous_mi(g, &FadingRealization::new(vec![0.3, 1.7, 0.9]));
        let b = instantaneous_mi(g, &FadingRealization::new(vec![0.9, 0.3, 1.7]));
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn erasure_outage_is_eps_squared() {
        assert!((erasure_outage(0.3, 0.5, 2) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn outage_tends_to_one_at_low_snr() {
        let est = outage_probability(1e-6, 0.5, 2, 10_000, 1);
        assert_eq!(est.p_out, 1.0);
    }

    #[test]
    fn outage_is_nonincreasing() {
        let mut prev = 1.0;
        for db in [0.0, 5.0, 10.0, 15.0] {
            let est = outage_probability(0.5 * db_to_linear(db), 0.5, 2, 50_000, 3);
            assert!(est.p_out <= prev);
            prev = est.p_out;
        }
    }

    #[test]
    fn quadrature_matches_monte_carlo_at_5db() {
        let gamma = 0.5 * db_to_linear(5.0);
        let exact = outage_quadrature_nc2(gamma, 0.5).unwrap();
        let est = outage_probability(gamma, 0.5, 2, 200_000, 7);
        assert!(est.ci_low <= exact && exact <= est.ci_high, "{exact} {est:?}");
    }

    #[test]
    fn config_derived_quantities() {
        let cfg = ChannelConfig::rayleigh(2, 0.5, 10.0 * 2f64.log10());
        assert!((cfg.gamma() - 1.0).abs() < 1e-12);
        assert!((cfg.sigma2() - 0.5).abs() < 1e-12);
        assert!(cfg.validate().is_ok());
        let bad = ChannelConfig { nc: 0, ..cfg };
        assert!(bad.validate().is_err());
    }
}
