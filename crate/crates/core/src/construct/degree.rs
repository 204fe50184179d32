use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// Edge-perspective degree distribution: `lambda` holds (variable degree,
/// fraction of edges), `rho` holds (check degree, fraction of edges).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub lambda: Vec<(usize, f64)>,
    pub rho: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    pub fn new(lambda: Vec<(usize, f64)>, rho: Vec<(usize, f64)>) -> Result<Self> {
        let dd = DegreeDistribution { lambda, rho };
        dd.validate()?;
        Ok(dd)
    }

    pub fn regular(dv: usize, dc: usize) -> Self {
        DegreeDistribution {
            lambda: vec![(dv, 1.0)],
            rho: vec![(dc, 1.0)],
        }
    }

    /// The rate-1/2 irregular pair λ(x) = 0.24426x + … + 0.40373x¹¹,
    /// ρ(x) = 0.25475x⁶ + 0.73438x⁷ + 0.01087x⁸.
    pub fn irregular_rate_half() -> Self {
        DegreeDistribution {
            lambda: vec![
                (2, 0.24426),
                (3, 0.25907),
                (4, 0.01054),
                (5, 0.05510),
                (8, 0.01455),
                (10, 0.01275),
                (12, 0.40373),
            ],
            rho: vec![(7, 0.25475), (8, 0.73438), (9, 0.01087)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, list) in [("lambda", &self.lambda), ("rho", &self.rho)] {
            if list.is_empty() {
                return Err(Error::DegreeDistribution(format!("{name} is empty")));
            }
            for &(deg, frac) in list {
                if deg == 0 {
                    return Err(Error::DegreeDistribution(format!("{name} has degree 0")));
                }
                if !(0.0..=1.0).contains(&frac) {
                    return Err(Error::DegreeDistribution(format!(
                        "{name} fraction {frac} for degree {deg} is outside [0, 1]"
                    )));
                }
            }
            let total: f64 = list.iter().map(|p| p.1).sum();
            if (total - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::DegreeDistribution(format!(
                    "{name} sums to {total}, expected 1"
                )));
            }
        }
        Ok(())
    }

    /// Degrees must be at least 2 wherever an edge is isolated (density
    /// evolution, multi-edge fractions).
    pub fn require_min_degree_two(&self) -> Result<()> {
        if let Some(&(d, _)) = self.lambda.iter().chain(&self.rho).find(|p| p.0 < 2 && p.1 > 0.0) {
            return Err(Error::DegreeDistribution(format!(
                "degree {d} nodes are not supported here"
            )));
        }
        Ok(())
    }

    /// ∫λ = Σ λ_i / i.
    pub fn lambda_integral(&self) -> f64 {
        self.lambda.iter().map(|&(i, l)| l / i as f64).sum()
    }

    /// ∫ρ = Σ ρ_j / j.
    pub fn rho_integral(&self) -> f64 {
        self.rho.iter().map(|&(j, r)| r / j as f64).sum()
    }

    pub fn design_rate(&self) -> f64 {
        1.0 - self.rho_integral() / self.lambda_integral()
    }

    /// Fraction of variable nodes of each degree.
    pub fn variable_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.lambda)
    }

    /// Fraction of check nodes of each degree.
    pub fn check_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.rho)
    }

    /// Multi-edge fractions (f_e, g_e) of a root ensemble: the share of
    /// non-root check sockets coming from information and parity bits.
    pub fn multiedge_fraction(&self) -> Result<(f64, f64)> {
        if let Some(&(d, _)) = self.lambda.iter().find(|p| p.0 < 2) {
            return Err(Error::DegreeDistribution(format!(
                "variable degree {d} has no non-root edge"
            )));
        }
        let info: f64 = self.lambda.iter().map(|&(i, l)| l / (i - 1) as f64).sum();
        let parity = self.lambda_integral();
        let fe = parity / (info + parity);
        Ok((fe, 1.0 - fe))
    }

    pub fn max_lambda_degree(&self) -> usize {
        self.lambda.iter().map(|p| p.0).max().unwrap_or(0)
    }

    pub fn max_rho_degree(&self) -> usize {
        self.rho.iter().map(|p| p.0).max().unwrap_or(0)
    }

    /// Edge-perspective distribution of a node-degree histogram.
    pub fn from_node_degrees(var_degrees: &[usize], check_degrees: &[usize]) -> Self {
        DegreeDistribution {
            lambda: edge_fractions(var_degrees),
            rho: edge_fractions(check_degrees),
        }
    }
}

fn node_fractions(edge: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let total: f64 = edge.iter().map(|&(d, f)| f / d as f64).sum();
    edge.iter()
        .map(|&(d, f)| (d, f / d as f64 / total))
        .collect()
}

fn edge_fractions(degrees: &[usize]) -> Vec<(usize, f64)> {
    let mut counts = std::collections::BTreeMap::new();
    for &d in degrees {
        *counts.entry(d).or_insert(0usize) += 1;
    }
    let edges: usize = degrees.iter().sum();
    counts
        .into_iter()
        .filter(|&(d, _)| d > 0)
        .map(|(d, n)| (d, (d * n) as f64 / edges as f64))
        .collect()
}

/// Split `total` items according to `weights` by largest remainder.
pub fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_fe_is_two_fifths() {
        let (fe, ge) = DegreeDistribution::regular(3, 6).multiedge_fraction().unwrap();
        assert!((fe - 0.4).abs() < 1e-15);
        assert!((fe + ge - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degree_two_fe_is_one_third() {
        let (fe, _) = DegreeDistribution::regular(2, 4).multiedge_fraction().unwrap();
        assert!((fe - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degree_one_is_rejected() {
        let dd = DegreeDistribution::new(vec![(1, 0.5), (3, 0.5)], vec![(6, 1.0)]).unwrap();
        assert!(dd.multiedge_fraction().is_err());
    }

    #[test]
    fn irregular_pair_is_valid_and_half_rate() {
        let dd = DegreeDistribution::irregular_rate_half();
        dd.validate().unwrap();
        assert!((dd.design_rate() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn invalid_sums_are_rejected() {
        assert!(DegreeDistribution::new(vec![(3, 0.9)], vec![(6, 1.0)]).is_err());
        assert!(DegreeDistribution::new(vec![(3, 1.0)], vec![(0, 1.0)]).is_err());
    }

    #[test]
    fn apportion_matches_total() {
        assert_eq!(apportion(&[0.5, 0.25, 0.25], 10), vec![5, 3, 2]);
        let c = apportion(&[1.0, 1.0, 1.0], 100);
        assert_eq!(c.iter().sum::<usize>(), 100);
    }

    #[test]
    fn edge_fraction_round_trip() {
        let dd = DegreeDistribution::from_node_degrees(&[3; 8], &[6; 4]);
        assert_eq!(dd, DegreeDistribution::regular(3, 6));
    }
}
