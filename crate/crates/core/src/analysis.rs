//! Closed-form χ² coding-gain functions and the G = P(|X₂| < |X₁|)
//! function, with Monte Carlo counterparts used as oracles.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channel::sample_exponential;
use crate::error::{Error, Result};
use crate::numeric::{integrate, q_function};
use crate::sampling::{chunk_sizes, run_chunks};

const BALANCE_TOL: f64 = 1e-9;

/// Weights of Y = a·α₁² + b·α₂² with unit-mean exponential α².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Chi2Params {
    pub a: f64,
    pub b: f64,
}

impl Chi2Params {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0) || (a + b - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("chi2 weights ({a}, {b}) must be nonnegative and sum to 1")));
        }
        Ok(Chi2Params { a, b })
    }

    /// Both weights equal 1/2.
    pub fn balanced() -> Self {
        Chi2Params { a: 0.5, b: 0.5 }
    }

    fn is_balanced(&self) -> bool {
        (self.a - self.b).abs() < BALANCE_TOL
    }
}

/// Density of Y at `y`.
pub fn chi2_pdf(y: f64, p: Chi2Params) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    if p.is_balanced() {
        return 4.0 * y * (-2.0 * y).exp();
    }
    if p.b == 0.0 || p.a == 0.0 {
        return (-y).exp();
    }
    ((-y / p.a).exp() - (-y / p.b).exp()) / (p.a - p.b)
}

/// P(Y ≤ t).
pub fn chi2_cdf(t: f64, p: Chi2Params) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if p.is_balanced() {
        return -(-2.0 * t).exp_m1() - 2.0 * t * (-2.0 * t).exp();
    }
    if p.b == 0.0 || p.a == 0.0 {
        return -(-t).exp_m1();
    }
    // 1 − (a e^{−t/a} − b e^{−t/b})/(a − b), arranged to avoid cancellation
    // for small t.
    (p.b * (-t / p.b).exp_m1() - p.a * (-t / p.a).exp_m1()) / (p.a - p.b)
}

/// SNR loss (dB) of the weights (a, b) against the balanced case, read off
/// the small-T asymptotes T²/(2ab) and 2T².
pub fn chi2_coding_loss_db(p: Chi2Params) -> Result<f64> {
    if p.a == 0.0 || p.b == 0.0 {
        return Err(Error::DiversityCollapse);
    }
    Ok(5.0 * (1.0 / (4.0 * p.a * p.b)).log10())
}

/// G(α₁, α₂, σ²) = P(|X₂| < |X₁|) with Xᵢ ~ N(αᵢ², αᵢ²σ²), by adaptive
/// quadrature over the density of |X₁|.
pub fn g_function(alpha1: f64, alpha2: f64, sigma2: f64) -> Result<f64> {
    if !(alpha1 > 0.0 && alpha2 > 0.0 && sigma2 > 0.0) {
        return Err(Error::Config(format!(
            "G needs positive arguments, got ({alpha1}, {alpha2}, {sigma2})"
        )));
    }
    let (m1, s1) = (alpha1 * alpha1, alpha1 * sigma2.sqrt());
    let (m2, s2) = (alpha2 * alpha2, alpha2 * sigma2.sqrt());
    let norm = 1.0 / (2.0 * std::f64::consts::PI * s1 * s1).sqrt();
    let f = |t: f64| {
        let density = norm * ((-(t - m1).powi(2) / (2.0 * s1 * s1)).exp() + (-(t + m1).powi(2) / (2.0 * s1 * s1)).exp());
        density * (q_function((t - m2) / s2) + q_function((t + m2) / s2))
    };
    let upper = m1 + 12.0 * s1;
    let tail = integrate(f, 0.0, upper, 1e-9)?;
    Ok(1.0 - tail)
}

/// G⁴ together with the 1/16 bound it satisfies: G⁴ ≥ 1/16 when α₂ ≤ α₁
/// and G⁴ ≤ 1/16 when α₁ ≤ α₂.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct G4Bound {
    pub g4: f64,
    pub bound_holds: bool,
}

pub fn g4_bound(alpha1: f64, alpha2: f64, sigma2: f64) -> Result<G4Bound> {
    let g4 = g_function(alpha1, alpha2, sigma2)?.powi(4);
    let slack = 1e-9;
    let bound_holds = match alpha2.partial_cmp(&alpha1) {
        Some(std::cmp::Ordering::Less) => g4 >= 1.0 / 16.0 - slack,
        Some(std::cmp::Ordering::Greater) => g4 <= 1.0 / 16.0 + slack,
        _ => (g4 - 1.0 / 16.0).abs() < 1e-6,
    };
    Ok(G4Bound { g4, bound_holds })
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

const MC_CHUNK: u64 = 1 << 16;

fn mc_fraction<F>(samples: u64, seed: u64, hit: F) -> McEstimate
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> bool + Sync,
{
    let sizes: Vec<u64> = chunk_sizes(samples, MC_CHUNK).collect();
    let hits: u64 = run_chunks(seed, 0, sizes.len() as u64, |k, rng| {
        (0..sizes[k as usize]).filter(|_| hit(rng)).count() as u64
    })
    .into_iter()
    .sum();
    let p = hits as f64 / samples as f64;
    McEstimate {
        value: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    }
}

/// Sampling estimate of P(aE₁ + bE₂ ≤ t).
pub fn chi2_cdf_mc(t: f64, p: Chi2Params, samples: u64, seed: u64) -> McEstimate {
    mc_fraction(samples, seed, |rng| {
        p.a * sample_exponential(rng) + p.b * sample_exponential(rng) <= t
    })
}

/// Sampling estimate of G(α₁, α₂, σ²).
pub fn g_function_mc(alpha1: f64, alpha2: f64, sigma2: f64, samples: u64, seed: u64) -> McEstimate {
    let sd = sigma2.sqrt();
    mc_fraction(samples, seed, |rng| {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let x1 = alpha1 * alpha1 + alpha1 * sd * z1;
        let x2 = alpha2 * alpha2 + alpha2 * sd * z2;
        x2.abs() < x1.abs()
    })
}
