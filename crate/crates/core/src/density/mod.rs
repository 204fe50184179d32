//! Quantized LLR densities and the two message-passing convolutions.
//!
//! A density lives on the symmetric grid {kδ : |k| ≤ K} plus explicit point
//! masses at ±∞. Variable nodes add independent messages (⊗, ordinary
//! convolution); check nodes combine them by the tanh rule (⊙), with each
//! output re-binned to the nearest grid point.

pub mod evolution;
pub mod fading;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::numeric::q_function;

/// Quantization grid: `half_bins` bins on each side of zero, spacing `step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub step: f64,
    pub half_bins: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid::new(0.05, 30.0)
    }
}

impl Grid {
    pub fn new(step: f64, half_range: f64) -> Self {
        Grid {
            step,
            half_bins: (half_range / step).round() as usize,
        }
    }

    pub fn bins(&self) -> usize {
        2 * self.half_bins + 1
    }

    pub fn half_range(&self) -> f64 {
        self.half_bins as f64 * self.step
    }

    /// LLR value at the center of array slot `i`.
    pub fn value(&self, i: usize) -> f64 {
        (i as f64 - self.half_bins as f64) * self.step
    }

    fn key(&self) -> (u64, usize) {
        (self.step.to_bits(), self.half_bins)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LlrDensity {
    grid: Grid,
    /// Probability of each finite bin, index 0 ↔ −K·δ.
    pub mass: Vec<f64>,
    pub pos_inf: f64,
    pub neg_inf: f64,
}

impl LlrDensity {
    fn empty(grid: Grid) -> Self {
        LlrDensity {
            grid,
            mass: vec![0.0; grid.bins()],
            pos_inf: 0.0,
            neg_inf: 0.0,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Unit mass at LLR 0 (an erased message).
    pub fn delta_zero(grid: Grid) -> Self {
        let mut d = LlrDensity::empty(grid);
        d.mass[grid.half_bins] = 1.0;
        d
    }

    /// Unit mass at +∞ (a certain message).
    pub fn delta_pos_inf(grid: Grid) -> Self {
        LlrDensity {
            pos_inf: 1.0,
            ..LlrDensity::empty(grid)
        }
    }

    /// Unit mass at the bin nearest `value`; out-of-range values go to ±∞.
    pub fn delta_at(grid: Grid, value: f64) -> Self {
        let mut d = LlrDensity::empty(grid);
        let k = (value / grid.step).round();
        if k > grid.half_bins as f64 {
            d.pos_inf = 1.0;
        } else if k < -(grid.half_bins as f64) {
            d.neg_inf = 1.0;
        } else {
            d.mass[(k as i64 + grid.half_bins as i64) as usize] = 1.0;
        }
        d
    }

    /// Gaussian N(mean, var) integrated over each bin; tails beyond the grid
    /// go to the infinite masses.
    pub fn gaussian(grid: Grid, mean: f64, var: f64) -> Self {
        let mut d = LlrDensity::empty(grid);
        let sd = var.sqrt();
        let k = grid.half_bins as f64;
        let half = 0.5 * grid.step;
        let edge = |x: f64| q_function((x - mean) / sd);
        let mut upper_tail = edge(-k * grid.step - half);
        d.neg_inf = 1.0 - upper_tail;
        for (i, m) in d.mass.iter_mut().enumerate() {
            let hi = edge(grid.value(i) + half);
            *m = (upper_tail - hi).max(0.0);
            upper_tail = hi;
        }
        d.pos_inf = upper_tail;
        // Use the complementary form on the left tail to avoid cancellation.
        d.neg_inf = q_function((mean + k * grid.step + half) / sd);
        d
    }

    /// Density of the channel LLR 2αy/σ² for the all-zero word: Gaussian with
    /// mean 2α²/σ² and variance 4α²/σ².
    pub fn channel(grid: Grid, alpha: f64, sigma2: f64) -> Self {
        if alpha == 0.0 {
            return LlrDensity::delta_zero(grid);
        }
        if alpha.is_infinite() {
            return LlrDensity::delta_pos_inf(grid);
        }
        let mean = 2.0 * alpha * alpha / sigma2;
        LlrDensity::gaussian(grid, mean, 2.0 * mean)
    }

    /// Channel density at symbol SNR `s` = α²·Es/N0 with unit noise scaling:
    /// mean 4s, variance 8s.
    pub fn channel_snr(grid: Grid, s: f64) -> Self {
        if s == 0.0 {
            return LlrDensity::delta_zero(grid);
        }
        if s.is_infinite() {
            return LlrDensity::delta_pos_inf(grid);
        }
        LlrDensity::gaussian(grid, 4.0 * s, 8.0 * s)
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.pos_inf + self.neg_inf
    }

    /// Mean and variance of the finite part, normalized by its mass.
    pub fn finite_moments(&self) -> (f64, f64) {
        let w: f64 = self.mass.iter().sum();
        let mean: f64 = self
            .mass
            .iter()
            .enumerate()
            .map(|(i, m)| m * self.grid.value(i))
            .sum::<f64>()
            / w;
        let var = self
            .mass
            .iter()
            .enumerate()
            .map(|(i, m)| m * (self.grid.value(i) - mean).powi(2))
            .sum::<f64>()
            / w;
        (mean, var)
    }

    /// Probability of a wrong hard decision: negative mass plus half the
    /// zero bin plus the −∞ mass.
    pub fn error_prob(&self) -> f64 {
        let k = self.grid.half_bins;
        self.mass[..k].iter().sum::<f64>() + 0.5 * self.mass[k] + self.neg_inf
    }

    fn check_grid(&self, other: &LlrDensity) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &LlrDensity, b: f64) -> Result<LlrDensity> {
        self.check_grid(other)?;
        Ok(LlrDensity {
            grid: self.grid,
            mass: self.mass.iter().zip(&other.mass).map(|(x, y)| a * x + b * y).collect(),
            pos_inf: a * self.pos_inf + b * other.pos_inf,
            neg_inf: a * self.neg_inf + b * other.neg_inf,
        })
    }

    /// Rescale to unit total mass. Iterated recursions amplify round-off
    /// in the total, so evolution steps renormalize their outputs.
    pub fn normalize(&mut self) {
        let t = self.total_mass();
        if t > 0.0 {
            self.scale(1.0 / t);
        }
    }

    fn scale(&mut self, w: f64) {
        self.mass.iter_mut().for_each(|m| *m *= w);
        self.pos_inf *= w;
        self.neg_inf *= w;
    }

    fn add_scaled(&mut self, w: f64, other: &LlrDensity) {
        for (x, y) in self.mass.iter_mut().zip(&other.mass) {
            *x += w * y;
        }
        self.pos_inf += w * other.pos_inf;
        self.neg_inf += w * other.neg_inf;
    }

    /// Weighted sum of densities on a common grid.
    pub fn mixture(parts: &[(f64, &LlrDensity)]) -> Result<LlrDensity> {
        let Some(first) = parts.first() else {
            return Err(Error::Numerical("empty mixture".into()));
        };
        let mut out = LlrDensity::empty(first.1.grid);
        for &(w, d) in parts {
            first.1.check_grid(d)?;
            out.add_scaled(w, d);
        }
        Ok(out)
    }

    /// Largest absolute bin difference, including the infinite masses.
    pub fn max_abs_diff(&self, other: &LlrDensity) -> f64 {
        self.mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (a - b).abs())
            .fold((self.pos_inf - other.pos_inf).abs().max((self.neg_inf - other.neg_inf).abs()), f64::max)
    }

    /// Text histogram, one `value mass` line per nonzero bin.
    pub fn to_histogram(&self) -> String {
        let mut s = format!("-inf {:e}\n", self.neg_inf);
        for (i, &m) in self.mass.iter().enumerate() {
            if m != 0.0 {
                s.push_str(&format!("{:.4} {:e}\n", self.grid.value(i), m));
            }
        }
        s.push_str(&format!("+inf {:e}\n", self.pos_inf));
        s
    }

    fn support(&self) -> Option<(usize, usize)> {
        let lo = self.mass.iter().position(|&m| m != 0.0)?;
        let hi = self.mass.iter().rposition(|&m| m != 0.0)?;
        Some((lo, hi))
    }
}

/// Precomputed tables for one grid.
pub struct Kernels {
    grid: Grid,
    fft_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// For each smaller magnitude l: first larger magnitude k whose tanh-rule
    /// output rounds back to l (index K+1 stands for ∞).
    cutoff: Vec<usize>,
    /// Rounded outputs for l ≤ k < cutoff[l], flattened with `offsets`.
    table: Vec<u32>,
    offsets: Vec<usize>,
}

impl Kernels {
    fn new(grid: Grid) -> Self {
        let k = grid.half_bins;
        let delta = grid.step;
        let mut cutoff = Vec::with_capacity(k + 2);
        let mut table = Vec::new();
        let mut offsets = Vec::with_capacity(k + 3);
        for l in 0..=k + 1 {
            offsets.push(table.len());
            if l == 0 || l == k + 1 {
                cutoff.push(l);
                continue;
            }
            let a = l as f64 * delta;
            let mut cut = k + 1;
            for m in l..=k {
                let b = m as f64 * delta;
                let out = a + (-(a + b)).exp().ln_1p() - (-(b - a)).exp().ln_1p();
                let r = ((out / delta).round().max(0.0) as usize).min(l);
                if r == l {
                    cut = m;
                    break;
                }
                table.push(r as u32);
            }
            cutoff.push(cut);
        }
        offsets.push(table.len());
        let fft_len = (4 * k + 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        Kernels {
            grid,
            fft_len,
            forward: planner.plan_fft_forward(fft_len),
            inverse: planner.plan_fft_inverse(fft_len),
            cutoff,
            table,
            offsets,
        }
    }

    /// Shared kernels for `grid`, built on first use.
    pub fn for_grid(grid: Grid) -> Arc<Kernels> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<Kernels>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().expect("kernel cache poisoned");
        map.entry(grid.key())
            .or_insert_with(|| Arc::new(Kernels::new(grid)))
            .clone()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// ⊗: density of the sum of two independent LLRs.
    pub fn conv_var(&self, p: &LlrDensity, q: &LlrDensity) -> LlrDensity {
        let k = self.grid.half_bins;
        let mut out = LlrDensity::empty(self.grid);
        let pf: f64 = p.mass.iter().sum();
        let qf: f64 = q.mass.iter().sum();

        // Finite ⊗ finite, on a linear index 0..=4K for values −2K..=2K.
        let mut full = vec![0.0; 4 * k + 1];
        if let (Some((plo, phi)), Some((qlo, qhi))) = (p.support(), q.support()) {
            if (phi - plo).min(qhi - qlo) < 64 {
                direct_convolution(&p.mass, (plo, phi), &q.mass, (qlo, qhi), &mut full);
            } else {
                self.fft_convolution(&p.mass, &q.mass, &mut full);
                // Clamping round-off to zero adds a little mass; take it back
                // so that iterated operators do not amplify it.
                let sum: f64 = full.iter().sum();
                if sum > 0.0 {
                    let scale = pf * qf / sum;
                    full.iter_mut().for_each(|f| *f *= scale);
                }
            }
        }
        for (s, &m) in full.iter().enumerate() {
            if s < k {
                out.neg_inf += m;
            } else if s > 3 * k {
                out.pos_inf += m;
            } else {
                out.mass[s - k] += m;
            }
        }
        // Infinite masses absorb finite ones; opposite infinities cancel.
        out.pos_inf += p.pos_inf * (qf + q.pos_inf) + q.pos_inf * pf;
        out.neg_inf += p.neg_inf * (qf + q.neg_inf) + q.neg_inf * pf;
        out.mass[k] += p.pos_inf * q.neg_inf + p.neg_inf * q.pos_inf;
        out
    }

    fn fft_convolution(&self, p: &[f64], q: &[f64], full: &mut [f64]) {
        let n = self.fft_len;
        let mut z: Vec<Complex<f64>> = (0..n)
            .map(|i| Complex::new(p.get(i).copied().unwrap_or(0.0), q.get(i).copied().unwrap_or(0.0)))
            .collect();
        self.forward.process(&mut z);
        // Unpack the two real spectra and multiply them.
        let mut prod = vec![Complex::new(0.0, 0.0); n];
        for i in 0..n {
            let a = z[i];
            let b = z[(n - i) % n].conj();
            let ps = (a + b) * 0.5;
            let qs = (a - b) * Complex::new(0.0, -0.5);
            prod[i] = ps * qs;
        }
        self.inverse.process(&mut prod);
        let scale = 1.0 / n as f64;
        for (s, f) in full.iter_mut().enumerate() {
            *f = (prod[s].re * scale).max(0.0);
        }
    }

    /// ⊙: density of 2·atanh(tanh(X/2)·tanh(Y/2)) for independent X, Y.
    pub fn conv_check(&self, p: &LlrDensity, q: &LlrDensity) -> LlrDensity {
        let k = self.grid.half_bins;
        // Fold into magnitude classes 0..=K and K+1 (∞), as totals and
        // signed differences.
        let fold = |d: &LlrDensity| {
            let mut tot = vec![0.0; k + 3];
            let mut dif = vec![0.0; k + 3];
            tot[0] = d.mass[k];
            for m in 1..=k {
                let (pos, neg) = (d.mass[k + m], d.mass[k - m]);
                tot[m] = pos + neg;
                dif[m] = pos - neg;
            }
            tot[k + 1] = d.pos_inf + d.neg_inf;
            dif[k + 1] = d.pos_inf - d.neg_inf;
            (tot, dif)
        };
        let suffix = |v: &[f64]| {
            let mut s = vec![0.0; v.len()];
            for i in (0..v.len() - 1).rev() {
                s[i] = s[i + 1] + v[i];
            }
            s
        };
        let (pt, pd) = fold(p);
        let (qt, qd) = fold(q);
        let (spt, spd, sqt, sqd) = (suffix(&pt), suffix(&pd), suffix(&qt), suffix(&qd));

        let mut tot = vec![0.0; k + 2];
        let mut dif = vec![0.0; k + 2];
        for l in 0..=k + 1 {
            let cut = self.cutoff[l];
            let row = &self.table[self.offsets[l]..self.offsets[l + 1]];
            let (ptl, pdl, qtl, qdl) = (pt[l], pd[l], qt[l], qd[l]);
            for (j, &r) in row.iter().enumerate() {
                let m = l + j;
                let r = r as usize;
                tot[r] += ptl * qt[m];
                dif[r] += pdl * qd[m];
                if m > l {
                    tot[r] += qtl * pt[m];
                    dif[r] += qdl * pd[m];
                }
            }
            let other = cut.max(l + 1);
            tot[l] += ptl * sqt[cut] + qtl * spt[other];
            dif[l] += pdl * sqd[cut] + qdl * spd[other];
        }

        let mut out = LlrDensity::empty(self.grid);
        out.mass[k] = tot[0];
        for m in 1..=k {
            out.mass[k + m] = (0.5 * (tot[m] + dif[m])).max(0.0);
            out.mass[k - m] = (0.5 * (tot[m] - dif[m])).max(0.0);
        }
        out.pos_inf = (0.5 * (tot[k + 1] + dif[k + 1])).max(0.0);
        out.neg_inf = (0.5 * (tot[k + 1] - dif[k + 1])).max(0.0);
        let (want, got) = (p.total_mass() * q.total_mass(), out.total_mass());
        if got > 0.0 {
            out.scale(want / got);
        }
        out
    }
}

fn direct_convolution(
    p: &[f64],
    (plo, phi): (usize, usize),
    q: &[f64],
    (qlo, qhi): (usize, usize),
    full: &mut [f64],
) {
    // Iterate over the narrower operand.
    let (a, (alo, ahi), b, (blo, bhi)) = if phi - plo <= qhi - qlo {
        (p, (plo, phi), q, (qlo, qhi))
    } else {
        (q, (qlo, qhi), p, (plo, phi))
    };
    for i in alo..=ahi {
        let w = a[i];
        if w == 0.0 {
            continue;
        }
        let dst = &mut full[i + blo..=i + bhi];
        for (d, &v) in dst.iter_mut().zip(&b[blo..=bhi]) {
            *d += w * v;
        }
    }
}

/// ⊗ with a grid check.
pub fn conv_var(p: &LlrDensity, q: &LlrDensity) -> Result<LlrDensity> {
    p.check_grid(q)?;
    Ok(Kernels::for_grid(p.grid).conv_var(p, q))
}

/// ⊙ with a grid check.
pub fn conv_check(p: &LlrDensity, q: &LlrDensity) -> Result<LlrDensity> {
    p.check_grid(q)?;
    Ok(Kernels::for_grid(p.grid).conv_check(p, q))
}

/// Reference ⊙ by direct pairwise mapping over all bin pairs.
pub fn conv_check_direct(p: &LlrDensity, q: &LlrDensity) -> Result<LlrDensity> {
    p.check_grid(q)?;
    let grid = p.grid;
    let k = grid.half_bins as i64;
    let value = |i: usize| -> f64 {
        if i == grid.bins() {
            f64::INFINITY
        } else if i == grid.bins() + 1 {
            f64::NEG_INFINITY
        } else {
            grid.value(i)
        }
    };
    let masses = |d: &LlrDensity| -> Vec<f64> {
        let mut v = d.mass.clone();
        v.push(d.pos_inf);
        v.push(d.neg_inf);
        v
    };
    let (pm, qm) = (masses(p), masses(q));
    let mut out = LlrDensity::empty(grid);
    for (i, &a) in pm.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in qm.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let (x, y) = (value(i), value(j));
            let w = a * b;
            let sign = x.signum() * y.signum();
            if x == 0.0 || y == 0.0 {
                out.mass[k as usize] += w;
                continue;
            }
            let (ax, ay) = (x.abs(), y.abs());
            if ax.is_infinite() && ay.is_infinite() {
                if sign > 0.0 {
                    out.pos_inf += w;
                } else {
                    out.neg_inf += w;
                }
                continue;
            }
            let (lo, hi) = if ax <= ay { (ax, ay) } else { (ay, ax) };
            let mag = if hi.is_infinite() {
                lo
            } else {
                lo + (-(lo + hi)).exp().ln_1p() - (-(hi - lo)).exp().ln_1p()
            };
            let r = ((mag / grid.step).round() as i64).min((lo / grid.step).round() as i64);
            let idx = if sign > 0.0 { k + r } else { k - r };
            out.mass[idx as usize] += w;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::default()
    }

    fn assert_close(a: &LlrDensity, b: &LlrDensity, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d < tol, "max diff {d}");
    }

    #[test]
    fn grid_shape() {
        let g = grid();
        assert_eq!(g.bins(), 1201);
        assert_eq!(g.value(600), 0.0);
        assert!((g.half_range() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn channel_density_moments() {
        let g = grid();
        let d = LlrDensity::channel(g, 1.0, 1.0);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        let (mean, var) = d.finite_moments();
        assert!((mean - 2.0).abs() < g.step * g.step, "{mean}");
        // Binning adds δ²/12 to the variance.
        assert!((var - 4.0 - g.step * g.step / 12.0).abs() < g.step * g.step, "{var}");
        assert_eq!(LlrDensity::channel(g, 0.0, 1.0), LlrDensity::delta_zero(g));
    }

    #[test]
    fn channel_consistency_ratio() {
        let g = Grid::new(0.01, 60.0);
        for alpha in [0.5, 0.8, 1.2] {
            let d = LlrDensity::channel(g, alpha, 1.0);
            let (mean, var) = d.finite_moments();
            assert!((var / mean - 2.0).abs() < 0.01, "{alpha}: {}", var / mean);
        }
    }

    #[test]
    fn var_conv_identity_and_shift() {
        let g = grid();
        let p = LlrDensity::channel(g, 0.9, 0.7);
        assert_close(&conv_var(&p, &LlrDensity::delta_zero(g)).unwrap(), &p, 1e-15);
        let s = conv_var(&LlrDensity::delta_at(g, 1.0), &LlrDensity::delta_at(g, 2.5)).unwrap();
        assert_close(&s, &LlrDensity::delta_at(g, 3.5), 1e-15);
    }

    #[test]
    fn var_conv_adds_means() {
        let g = grid();
        let p = LlrDensity::channel_snr(g, 0.3);
        let q = LlrDensity::channel_snr(g, 0.5);
        let r = conv_var(&p, &q).unwrap();
        assert!((r.total_mass() - 1.0).abs() < 1e-9);
        let (mp, _) = p.finite_moments();
        let (mq, _) = q.finite_moments();
        let (mr, _) = r.finite_moments();
        assert!((mr - mp - mq).abs() < 1e-6, "{mr} vs {}", mp + mq);
    }

    #[test]
    fn var_conv_fft_matches_direct() {
        let g = grid();
        let p = LlrDensity::channel_snr(g, 0.4);
        let q = LlrDensity::channel_snr(g, 0.2);
        let kern = Kernels::for_grid(g);
        let mut fast = vec![0.0; 4 * g.half_bins + 1];
        kern.fft_convolution(&p.mass, &q.mass, &mut fast);
        let mut slow = vec![0.0; 4 * g.half_bins + 1];
        direct_convolution(&p.mass, p.support().unwrap(), &q.mass, q.support().unwrap(), &mut slow);
        let diff = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-15, "{diff}");
    }

    #[test]
    fn var_conv_infinities() {
        let g = grid();
        let r = conv_var(&LlrDensity::delta_pos_inf(g), &LlrDensity::delta_at(g, -3.0)).unwrap();
        assert_eq!(r.pos_inf, 1.0);
        let mut minus = LlrDensity::delta_pos_inf(g);
        minus.pos_inf = 0.0;
        minus.neg_inf = 1.0;
        let r = conv_var(&LlrDensity::delta_pos_inf(g), &minus).unwrap();
        assert_eq!(r, LlrDensity::delta_zero(g));
    }

    #[test]
    fn check_conv_identities() {
        let g = grid();
        let p = LlrDensity::channel_snr(g, 0.5);
        assert_close(&conv_check(&LlrDensity::delta_pos_inf(g), &p).unwrap(), &p, 1e-15);
        assert_close(&conv_check(&p, &LlrDensity::delta_pos_inf(g)).unwrap(), &p, 1e-15);
        assert_eq!(conv_check(&LlrDensity::delta_zero(g), &p).unwrap().mass[g.half_bins], p.total_mass());
    }

    #[test]
    fn check_conv_deltas() {
        let g = grid();
        for (a, b) in [(2.0, 3.0), (1.0, -0.5), (-4.0, -4.0), (0.3, 12.0)] {
            let r = conv_check(&LlrDensity::delta_at(g, a), &LlrDensity::delta_at(g, b)).unwrap();
            let exact = 2.0 * ((0.5 * a).tanh() * (0.5 * b).tanh()).atanh();
            let idx = r.mass.iter().position(|&m| m == 1.0).expect("single bin");
            assert!((g.value(idx) - exact).abs() <= g.step, "{a} {b}: {} vs {exact}", g.value(idx));
        }
    }

    #[test]
    fn check_conv_fast_matches_direct() {
        let g = grid();
        let p = LlrDensity::channel_snr(g, 0.6);
        let q = LlrDensity::channel_snr(g, 0.25);
        let fast = conv_check(&p, &q).unwrap();
        let slow = conv_check_direct(&p, &q).unwrap();
        assert_close(&fast, &slow, 1e-14);
        assert!((fast.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn check_conv_matches_sampling() {
        use rand::{Rng, SeedableRng};
        use rand_distr::StandardNormal;
        let g = grid();
        let (sa, sb) = (0.8, 0.3);
        let r = conv_check(&LlrDensity::channel_snr(g, sa), &LlrDensity::channel_snr(g, sb)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let mut below = 0usize;
        for _ in 0..n {
            let x = 4.0 * sa + (8.0 * sa as f64).sqrt() * rng.sample::<f64, _>(StandardNormal);
            let y = 4.0 * sb + (8.0 * sb as f64).sqrt() * rng.sample::<f64, _>(StandardNormal);
            let z = 2.0 * ((0.5 * x).tanh() * (0.5 * y).tanh()).atanh();
            below += (z < 0.0) as usize;
        }
        let p = below as f64 / n as f64;
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        // Rounding moves at most the mass of one bin across zero.
        let slack = r.mass[g.half_bins];
        assert!((r.error_prob() - p).abs() < 4.0 * sd + slack, "{} vs {p}", r.error_prob());
    }

    #[test]
    fn error_prob_conventions() {
        let g = grid();
        assert_eq!(LlrDensity::delta_pos_inf(g).error_prob(), 0.0);
        assert_eq!(LlrDensity::delta_zero(g).error_prob(), 0.5);
        let sym = LlrDensity::gaussian(g, 0.0, 4.0);
        assert!((sym.error_prob() - 0.5).abs() < g.step);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = LlrDensity::delta_zero(Grid::default());
        let b = LlrDensity::delta_zero(Grid::new(0.1, 30.0));
        assert!(matches!(conv_var(&a, &b), Err(Error::GridMismatch)));
        assert!(matches!(conv_check(&a, &b), Err(Error::GridMismatch)));
    }
}
