//! Density evolution for random and root-LDPC ensembles.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Grid, Kernels, LlrDensity};
use crate::channel::capacity_ebn0_db;
use crate::construct::DegreeDistribution;
use crate::error::{Error, Result};
use crate::numeric::db_to_linear;

/// Which recursion to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Random,
    Root,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeConfig {
    pub step: f64,
    pub half_range: f64,
    pub max_iter: usize,
    /// Success once the information error probability is below this.
    pub target: f64,
    /// Failure once an iteration improves the error probability by less.
    pub stall: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            step: 0.05,
            half_range: 30.0,
            max_iter: 500,
            target: 1e-7,
            stall: 1e-12,
        }
    }
}

impl DeConfig {
    pub fn grid(&self) -> Grid {
        Grid::new(self.step, self.half_range)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.half_range > self.step) {
            return Err(Error::Config(format!(
                "density grid step {} and range {} are invalid",
                self.step, self.half_range
            )));
        }
        if self.max_iter == 0 || !(self.target > 0.0) {
            return Err(Error::Config("max_iter and target must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeOutcome {
    pub converged: bool,
    pub iterations: usize,
    pub error_prob: f64,
}

/// Messages of the root recursion. Messages on edges from parity nodes and
/// from information nodes into the opposite block's checks share one
/// density (`q`), so the g densities are aliases.
#[derive(Clone, Debug, PartialEq)]
pub struct DeState {
    pub q1: LlrDensity,
    pub q2: LlrDensity,
    pub f1: LlrDensity,
    pub f2: LlrDensity,
    pub iteration: usize,
}

impl DeState {
    /// Every message starts as its node's channel density.
    pub fn initial(mu1: &LlrDensity, mu2: &LlrDensity) -> Self {
        DeState {
            q1: mu1.clone(),
            q2: mu2.clone(),
            f1: mu1.clone(),
            f2: mu2.clone(),
            iteration: 0,
        }
    }

    pub fn g1(&self) -> &LlrDensity {
        &self.q1
    }

    pub fn g2(&self) -> &LlrDensity {
        &self.q2
    }
}

/// Degree-distribution mixtures over a fixed grid.
pub struct Mixer {
    kern: Arc<Kernels>,
    dd: DegreeDistribution,
    node_fractions: Vec<(usize, f64)>,
    fe: f64,
    ge: f64,
}

impl Mixer {
    pub fn new(dd: &DegreeDistribution, grid: Grid) -> Result<Self> {
        dd.validate()?;
        dd.require_min_degree_two()?;
        let (fe, ge) = dd.multiedge_fraction()?;
        Ok(Mixer {
            kern: Kernels::for_grid(grid),
            dd: dd.clone(),
            node_fractions: dd.variable_node_fractions(),
            fe,
            ge,
        })
    }

    pub fn grid(&self) -> Grid {
        self.kern.grid()
    }

    pub fn multiedge_fraction(&self) -> (f64, f64) {
        (self.fe, self.ge)
    }

    pub fn conv_var(&self, p: &LlrDensity, q: &LlrDensity) -> LlrDensity {
        self.kern.conv_var(p, q)
    }

    pub fn conv_check(&self, p: &LlrDensity, q: &LlrDensity) -> LlrDensity {
        self.kern.conv_check(p, q)
    }

    /// `[p^{⊗0}, …, p^{⊗n}]` with p^{⊗0} = delta(0).
    fn var_powers(&self, p: &LlrDensity, n: usize) -> Vec<LlrDensity> {
        let mut out = vec![LlrDensity::delta_zero(self.grid())];
        for k in 1..=n {
            let next = if k == 1 { p.clone() } else { self.conv_var(&out[k - 1], p) };
            out.push(next);
        }
        out
    }

    /// `[p^{⊙0}, …, p^{⊙n}]` with p^{⊙0} = delta(+∞).
    fn check_powers(&self, p: &LlrDensity, n: usize) -> Vec<LlrDensity> {
        let mut out = vec![LlrDensity::delta_pos_inf(self.grid())];
        for k in 1..=n {
            let next = if k == 1 { p.clone() } else { self.conv_check(p, &out[k - 1]) };
            out.push(next);
        }
        out
    }

    fn weighted(&self, powers: &[LlrDensity], terms: impl Iterator<Item = (usize, f64)>) -> LlrDensity {
        let parts: Vec<(f64, &LlrDensity)> = terms.map(|(k, w)| (w, &powers[k])).collect();
        LlrDensity::mixture(&parts).expect("powers share a grid")
    }

    /// Σ λᵢ p^{⊗(i−1)}.
    pub fn mix_lambda(&self, p: &LlrDensity) -> LlrDensity {
        let pw = self.var_powers(p, self.dd.max_lambda_degree() - 1);
        self.weighted(&pw, self.dd.lambda.iter().map(|&(i, l)| (i - 1, l)))
    }

    /// Σ λᵢ p^{⊗(i−2)}, for an edge whose node also has one isolated edge.
    pub fn mix_lambda_tilde(&self, p: &LlrDensity) -> LlrDensity {
        let pw = self.var_powers(p, self.dd.max_lambda_degree() - 2);
        self.weighted(&pw, self.dd.lambda.iter().map(|&(i, l)| (i - 2, l)))
    }

    /// Σ ρⱼ p^{⊙(j−1)}.
    pub fn mix_rho(&self, p: &LlrDensity) -> LlrDensity {
        let pw = self.check_powers(p, self.dd.max_rho_degree() - 1);
        self.weighted(&pw, self.dd.rho.iter().map(|&(j, r)| (j - 1, r)))
    }

    /// Σ ρⱼ p^{⊙(j−2)}.
    pub fn mix_rho_tilde(&self, p: &LlrDensity) -> LlrDensity {
        let pw = self.check_powers(p, self.dd.max_rho_degree() - 2);
        self.weighted(&pw, self.dd.rho.iter().map(|&(j, r)| (j - 2, r)))
    }

    /// One block's update from the ⊙ powers of both blocks' check-bound
    /// mixtures. Returns (q', f', information a-posteriori).
    fn root_block(
        &self,
        mu: &LlrDensity,
        q_other: &LlrDensity,
        own: &[LlrDensity],
        other: &[LlrDensity],
    ) -> (LlrDensity, LlrDensity, LlrDensity) {
        let dv = self.dd.max_lambda_degree();
        // Checks of the other block: one edge back to the other block's
        // information node, the rest into this block.
        let c = self.conv_check(q_other, &self.weighted(own, self.dd.rho.iter().map(|&(j, r)| (j - 2, r))));
        // This block's rootchecks see only the other block.
        let r = self.weighted(other, self.dd.rho.iter().map(|&(j, w)| (j - 1, w)));

        let cp = self.var_powers(&c, dv - 1);
        let lam = self.weighted(&cp, self.dd.lambda.iter().map(|&(i, l)| (i - 1, l)));
        let lam_t = self.weighted(&cp, self.dd.lambda.iter().map(|&(i, l)| (i - 2, l)));
        let mut q = self.conv_var(mu, &lam);
        let mu_r = self.conv_var(mu, &r);
        let mut f = self.conv_var(&mu_r, &lam_t);
        q.normalize();
        f.normalize();
        let post_ext = self.weighted(&cp, self.node_fractions.iter().map(|&(i, l)| (i - 1, l)));
        let post = self.conv_var(&mu_r, &post_ext);
        (q, f, post)
    }

    /// One root iteration. Also returns the two information a-posteriori
    /// densities.
    pub fn de_step_root(
        &self,
        state: &DeState,
        mu1: &LlrDensity,
        mu2: &LlrDensity,
    ) -> (DeState, LlrDensity, LlrDensity) {
        let mix1 = state.f1.combine(self.fe, state.g1(), self.ge).expect("same grid");
        let mix2 = state.f2.combine(self.fe, state.g2(), self.ge).expect("same grid");
        let dc = self.dd.max_rho_degree();
        let pw1 = self.check_powers(&mix1, dc - 1);
        let pw2 = self.check_powers(&mix2, dc - 1);
        let (q1, f1, post1) = self.root_block(mu1, &state.q2, &pw1, &pw2);
        let (q2, f2, post2) = self.root_block(mu2, &state.q1, &pw2, &pw1);
        let next = DeState {
            q1,
            q2,
            f1,
            f2,
            iteration: state.iteration + 1,
        };
        (next, post1, post2)
    }

    /// One classical iteration p ↦ μ ⊗ λ(ρ(p)); also returns the
    /// a-posteriori density μ ⊗ Σ Lᵢ c^{⊗i}.
    pub fn de_step_classical(&self, p: &LlrDensity, mu: &LlrDensity) -> (LlrDensity, LlrDensity) {
        let c = self.mix_rho(p);
        let cp = self.var_powers(&c, self.dd.max_lambda_degree());
        let lam = self.weighted(&cp, self.dd.lambda.iter().map(|&(i, l)| (i - 1, l)));
        let post = self.weighted(&cp, self.node_fractions.iter().map(|&(i, l)| (i, l)));
        let mut next = self.conv_var(mu, &lam);
        next.normalize();
        (next, self.conv_var(mu, &post))
    }

    /// Root recursion with block channel densities `mu1`, `mu2`.
    pub fn run_root(&self, mu1: &LlrDensity, mu2: &LlrDensity, cfg: &DeConfig) -> DeOutcome {
        let mut state = DeState::initial(mu1, mu2);
        iterate(cfg, |_| {
            let (next, p1, p2) = self.de_step_root(&state, mu1, mu2);
            state = next;
            p1.error_prob().max(p2.error_prob())
        })
    }

    /// Classical recursion for a random ensemble whose bits are split evenly
    /// between the two block densities.
    pub fn run_classical(&self, mu1: &LlrDensity, mu2: &LlrDensity, cfg: &DeConfig) -> DeOutcome {
        let mu = mu1.combine(0.5, mu2, 0.5).expect("same grid");
        let mut p = mu.clone();
        iterate(cfg, |_| {
            let (next, post) = self.de_step_classical(&p, &mu);
            p = next;
            post.error_prob()
        })
    }

    pub fn run(&self, ensemble: Ensemble, mu1: &LlrDensity, mu2: &LlrDensity, cfg: &DeConfig) -> DeOutcome {
        match ensemble {
            Ensemble::Random => self.run_classical(mu1, mu2, cfg),
            Ensemble::Root => self.run_root(mu1, mu2, cfg),
        }
    }

    /// Decodability at block SNRs s₁, s₂ (α²·Es/N0 per block).
    pub fn run_snr(&self, ensemble: Ensemble, s1: f64, s2: f64, cfg: &DeConfig) -> DeOutcome {
        let g = self.grid();
        self.run(ensemble, &LlrDensity::channel_snr(g, s1), &LlrDensity::channel_snr(g, s2), cfg)
    }
}

fn iterate(cfg: &DeConfig, mut step: impl FnMut(usize) -> f64) -> DeOutcome {
    let mut prev = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let err = step(it);
        if err < cfg.target {
            return DeOutcome { converged: true, iterations: it, error_prob: err };
        }
        if prev - err < cfg.stall {
            return DeOutcome { converged: false, iterations: it, error_prob: err };
        }
        prev = err;
    }
    DeOutcome { converged: false, iterations: cfg.max_iter, error_prob: prev }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub ensemble: Ensemble,
    /// Smallest Eb/N0 (dB) at which the recursion converges.
    pub threshold_db: f64,
    /// Rate-matched BPSK capacity limit (dB).
    pub capacity_db: f64,
    pub gap_db: f64,
    /// α_th/α₀ reading the threshold as an absolute Eb/N0.
    pub ratio_absolute: f64,
    /// α_th/α₀ reading the threshold figure as a gap to capacity.
    pub ratio_gap: f64,
    pub probes: usize,
}

/// √ of the linear ratio between a threshold Eb/N0 and the capacity limit.
pub fn threshold_ratio(threshold_ebn0_db: f64, rate: f64) -> Result<f64> {
    let cap = capacity_ebn0_db(rate)?;
    Ok(db_to_linear(threshold_ebn0_db - cap).sqrt())
}

/// Smallest Eb/N0 (dB, unfaded AWGN) at which density evolution succeeds,
/// bisected to `tol_db`.
pub fn awgn_threshold(dd: &DegreeDistribution, ensemble: Ensemble, cfg: &DeConfig, tol_db: f64) -> Result<ThresholdReport> {
    cfg.validate()?;
    let mixer = Mixer::new(dd, cfg.grid())?;
    let rate = dd.design_rate();
    let capacity_db = capacity_ebn0_db(rate)?;
    let mut probes = 0;
    let mut decodes = |db: f64| {
        probes += 1;
        let s = rate * db_to_linear(db);
        mixer.run_snr(ensemble, s, s, cfg).converged
    };
    let (mut lo, mut hi) = (capacity_db, capacity_db + 1.0);
    while !decodes(hi) {
        lo = hi;
        hi += 1.0;
        if hi > capacity_db + 20.0 {
            return Err(Error::Numerical("threshold search did not converge below 20 dB above capacity".into()));
        }
    }
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if decodes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let threshold_db = hi;
    Ok(ThresholdReport {
        ensemble,
        threshold_db,
        capacity_db,
        gap_db: threshold_db - capacity_db,
        ratio_absolute: db_to_linear(threshold_db - capacity_db).sqrt(),
        ratio_gap: db_to_linear(threshold_db).sqrt(),
        probes,
    })
}
