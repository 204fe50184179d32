//! Density evolution over block-fading realizations.
//!
//! With two fading blocks, decodability depends only on the block SNRs
//! s₁ = γα₁², s₂ = γα₂². The undecodable region in (s₁, s₂) does not depend
//! on γ, is symmetric, and is closed under decreasing either coordinate.
//! [`DecodingRegion`] caches every density-evolution verdict and answers new
//! queries by dominance whenever it can.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::evolution::{DeConfig, Ensemble, Mixer};
use super::LlrDensity;
use crate::channel::sample_exponential;
use crate::construct::DegreeDistribution;
use crate::error::{Error, Result};
use crate::numeric::{db_to_linear, integrate, integrate_to_infinity, normal_quantile};
use crate::sampling::chunk_rng;

/// Block SNR treated as "fading-free" during boundary searches.
const S_MAX: f64 = 1e4;
const S_MIN: f64 = 1e-4;

pub struct DecodingRegion {
    mixer: Mixer,
    ensemble: Ensemble,
    cfg: DeConfig,
    /// Canonical (s₁ ≤ s₂) points known to decode / fail.
    decodable: Vec<(f64, f64)>,
    undecodable: Vec<(f64, f64)>,
    de_runs: usize,
}

impl DecodingRegion {
    pub fn new(dd: &DegreeDistribution, ensemble: Ensemble, cfg: &DeConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(DecodingRegion {
            mixer: Mixer::new(dd, cfg.grid())?,
            ensemble,
            cfg: *cfg,
            decodable: Vec::new(),
            undecodable: Vec::new(),
            de_runs: 0,
        })
    }

    /// Number of density-evolution runs performed so far.
    pub fn de_runs(&self) -> usize {
        self.de_runs
    }

    fn lookup(&self, x: f64, y: f64) -> Option<bool> {
        if self.decodable.iter().any(|&(a, b)| x >= a && y >= b) {
            return Some(true);
        }
        if self.undecodable.iter().any(|&(a, b)| x <= a && y <= b) {
            return Some(false);
        }
        None
    }

    /// Whether density evolution succeeds at block SNRs (s₁, s₂).
    pub fn decodable(&mut self, s1: f64, s2: f64) -> bool {
        let (x, y) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        if let Some(v) = self.lookup(x, y) {
            return v;
        }
        self.de_runs += 1;
        let ok = self.mixer.run_snr(self.ensemble, x, y, &self.cfg).converged;
        if ok {
            self.decodable.push((x, y));
        } else {
            self.undecodable.push((x, y));
        }
        ok
    }

    /// Geometric bisection for the boundary between a failing `lo` and a
    /// decoding `hi` along one coordinate; returns the final bracket.
    fn bisect(&mut self, mut lo: f64, mut hi: f64, rel_tol: f64, at: impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
        while hi > lo * (1.0 + rel_tol) {
            let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
            let (a, b) = at(mid);
            if self.decodable(a, b) {
                hi = mid;
            } else {
                lo = mid;
            }
            if lo == 0.0 && hi < S_MIN {
                break;
            }
        }
        (lo, hi)
    }

    /// Trace the boundary curve with `points` samples on each side of the
    /// diagonal, to relative precision `rel_tol`.
    pub fn trace(&mut self, points: usize, rel_tol: f64) -> BoundaryCurve {
        // Smallest s₁ that decodes when the other block is perfect.
        let axis = if self.decodable(0.0, f64::INFINITY) {
            0.0
        } else if !self.decodable(S_MAX, f64::INFINITY) {
            return BoundaryCurve { axis: f64::INFINITY, points: Vec::new() };
        } else {
            self.bisect(S_MIN, S_MAX, rel_tol, |s| (s, f64::INFINITY)).1
        };
        let diag = self.bisect(axis.max(S_MIN), S_MAX, rel_tol, |s| (s, s)).1;

        let mut canon = Vec::with_capacity(points + 2);
        if axis == 0.0 {
            let b0 = self.bisect(diag, S_MAX, rel_tol, |s| (0.0, s));
            canon.push((0.0, b0.1));
        }
        // Offsets from the axis shrink geometrically toward it.
        let span = diag - axis;
        for i in (0..points).rev() {
            let x = axis + span * (1e-4f64).powf((i + 1) as f64 / points as f64);
            let hi = if self.decodable(x, S_MAX) { S_MAX } else { f64::INFINITY };
            let b = if hi.is_infinite() { hi } else { self.bisect(diag, S_MAX, rel_tol, |s| (x, s)).1 };
            if b.is_finite() {
                canon.push((x, b));
            }
        }
        canon.push((diag, diag));
        // Refine where the curve drops steeply between neighbours.
        for _ in 0..points / 3 {
            let steepest = canon
                .windows(2)
                .enumerate()
                .map(|(i, w)| (i, w[0].1 / w[1].1))
                .filter(|&(i, _)| canon[i + 1].0 - canon[i].0 > 1e-6 * diag)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            let Some((i, _)) = steepest.filter(|&(_, r)| r > 1.25) else {
                break;
            };
            let ((x0, b0), (x1, b1)) = (canon[i], canon[i + 1]);
            let x = if x0 > 0.0 { (x0 * x1).sqrt() } else { 0.5 * x1 };
            let b = self.bisect(b1, b0, rel_tol, |s| (x, s)).1;
            canon.insert(i + 1, (x, b));
        }
        let mut all: Vec<(f64, f64)> = canon.iter().copied().chain(canon.iter().map(|&(x, y)| (y, x))).collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        all.dedup_by(|a, b| a.0 == b.0);
        BoundaryCurve { axis, points: all }
    }
}

/// Piecewise-linear boundary s₂ = b(s₁) of the undecodable region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryCurve {
    /// Below this s₁ nothing decodes; b = ∞.
    pub axis: f64,
    /// (s₁, b(s₁)) with s₁ increasing.
    pub points: Vec<(f64, f64)>,
}

impl BoundaryCurve {
    /// Smallest decoding s₂ for a given s₁.
    pub fn at(&self, s1: f64) -> f64 {
        if s1 < self.axis || self.points.is_empty() {
            return f64::INFINITY;
        }
        let i = self.points.partition_point(|p| p.0 <= s1);
        if i == 0 {
            return self.points[0].1;
        }
        if i == self.points.len() {
            return self.axis;
        }
        let (x0, y0) = self.points[i - 1];
        let (x1, y1) = self.points[i];
        y0 + (y1 - y0) * (s1 - x0) / (x1 - x0)
    }

    /// P[(γu₁, γu₂) undecodable] for independent unit exponentials u.
    pub fn outage(&self, gamma: f64) -> Result<f64> {
        const TOL: f64 = 1e-15;
        if !self.axis.is_finite() || self.points.is_empty() {
            return Ok(1.0);
        }
        let f = |u: f64| (-u).exp() * -(-self.at(gamma * u) / gamma).exp_m1();
        let mut total = -(-self.axis / gamma).exp_m1();
        let mut edges: Vec<f64> = self.points.iter().map(|p| p.0 / gamma).filter(|&u| u > self.axis / gamma).collect();
        edges.insert(0, self.axis / gamma);
        for w in edges.windows(2) {
            total += integrate(f, w[0], w[1], TOL)?;
        }
        total += integrate_to_infinity(f, *edges.last().expect("nonempty"), TOL)?;
        Ok(total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadingSampling {
    MonteCarlo,
    Quadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticOptions {
    pub de: DeConfig,
    pub sampling: FadingSampling,
    pub samples: u64,
    pub seed: u64,
    /// Boundary samples on each side of the diagonal.
    pub boundary_points: usize,
    pub boundary_tol: f64,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        AsymptoticOptions {
            de: DeConfig::default(),
            sampling: FadingSampling::MonteCarlo,
            samples: 10_000,
            seed: 1,
            boundary_points: 24,
            boundary_tol: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticPoint {
    pub ebn0_db: f64,
    pub wer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub de_runs: usize,
}

impl AsymptoticPoint {
    pub const CSV_HEADER: &'static str = "ebn0_db,wer,ci_low,ci_high,samples,de_runs";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.6e},{:.6e},{:.6e},{},{}",
            self.ebn0_db, self.wer, self.ci_low, self.ci_high, self.samples, self.de_runs
        )
    }
}

const SAMPLE_CHUNK: u64 = 1024;

/// Importance-sampling proposal: an equal mixture of the true unit
/// exponential and a narrow exponential near the origin.
fn proposal_draw<R: Rng>(rng: &mut R, narrow: f64) -> (f64, f64) {
    let wide = rng.gen_bool(0.5);
    let u = sample_exponential(rng) * if wide { 1.0 } else { narrow };
    let q = 0.5 * (-u).exp() + 0.5 / narrow * (-u / narrow).exp();
    (u, (-u).exp() / q)
}

/// Information-bit word error rate in the large-length limit, as the
/// probability that density evolution fails at the drawn block SNRs.
pub fn de_asymptotic_wer(
    dd: &DegreeDistribution,
    ensemble: Ensemble,
    ebn0_list: &[f64],
    opts: &AsymptoticOptions,
) -> Result<Vec<AsymptoticPoint>> {
    if opts.samples == 0 && opts.sampling == FadingSampling::MonteCarlo {
        return Err(Error::Config("fading sample count must be positive".into()));
    }
    let mut region = DecodingRegion::new(dd, ensemble, &opts.de)?;
    let curve = region.trace(opts.boundary_points, opts.boundary_tol);
    let rate = dd.design_rate();
    let z = normal_quantile(0.995);
    let mut out = Vec::with_capacity(ebn0_list.len());
    for (k, &db) in ebn0_list.iter().enumerate() {
        let gamma = rate * db_to_linear(db);
        let before = region.de_runs();
        let point = match opts.sampling {
            FadingSampling::Quadrature => {
                let p = curve.outage(gamma)?;
                AsymptoticPoint { ebn0_db: db, wer: p, ci_low: p, ci_high: p, samples: 0, de_runs: 0 }
            }
            FadingSampling::MonteCarlo => {
                let narrow = (4.0 / gamma).min(1.0);
                let (mut sum, mut sum2) = (0.0, 0.0);
                let mut drawn = 0;
                let mut chunk = 0;
                while drawn < opts.samples {
                    let n = SAMPLE_CHUNK.min(opts.samples - drawn);
                    let mut rng = chunk_rng(opts.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15), chunk);
                    for _ in 0..n {
                        let (u1, w1) = proposal_draw(&mut rng, narrow);
                        let (u2, w2) = proposal_draw(&mut rng, narrow);
                        if !region.decodable(gamma * u1, gamma * u2) {
                            let w = w1 * w2;
                            sum += w;
                            sum2 += w * w;
                        }
                    }
                    drawn += n;
                    chunk += 1;
                }
                let n = drawn as f64;
                let mean = sum / n;
                let sd = ((sum2 / n - mean * mean).max(0.0) / n).sqrt();
                AsymptoticPoint {
                    ebn0_db: db,
                    wer: mean,
                    ci_low: (mean - z * sd).max(0.0),
                    ci_high: (mean + z * sd).min(1.0),
                    samples: drawn,
                    de_runs: 0,
                }
            }
        };
        out.push(AsymptoticPoint { de_runs: region.de_runs() - before, ..point });
    }
    Ok(out)
}

/// Word error rate under block erasures: each block is erased with
/// probability `epsilon` and otherwise noiseless.
pub fn erasure_asymptotic_wer(dd: &DegreeDistribution, ensemble: Ensemble, epsilon: f64, cfg: &DeConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Config(format!("erasure probability {epsilon} is outside [0, 1]")));
    }
    let mixer = Mixer::new(dd, cfg.grid())?;
    let g = mixer.grid();
    let block = |erased: bool| if erased { LlrDensity::delta_zero(g) } else { LlrDensity::delta_pos_inf(g) };
    let mut wer = 0.0;
    for (e1, e2) in [(false, false), (false, true), (true, false), (true, true)] {
        let p = if e1 { epsilon } else { 1.0 - epsilon } * if e2 { epsilon } else { 1.0 - epsilon };
        if !mixer.run(ensemble, &block(e1), &block(e2), cfg).converged {
            wer += p;
        }
    }
    Ok(wer)
}
