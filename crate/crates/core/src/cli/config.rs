use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelConfig, FadingMode};
use crate::construct::DegreeDistribution;
use crate::decoder::sim::{ErrorMetric, StopRule};
use crate::decoder::DecoderConfig;
use crate::density::evolution::{DeConfig, Ensemble};
use crate::density::fading::FadingSampling;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Construct,
    Analyze,
    Simulate,
    Outage,
    DeThreshold,
    DeWer,
    Appendix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CodeFamily {
    /// Regular (3,6) root-LDPC.
    Root,
    /// Root-LDPC with the degree distribution of the `degrees` table.
    RootIrregular,
    /// Random regular LDPC with degrees (dv, dc).
    Random,
    Wstar2,
    Wstar3,
    RandomFullDiversity,
    /// Parity-check matrix read from `path`.
    Alist,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DegreeSpec {
    Regular { dv: usize, dc: usize },
    IrregularRateHalf,
    Custom { lambda: Vec<(usize, f64)>, rho: Vec<(usize, f64)> },
}

impl Default for DegreeSpec {
    fn default() -> Self {
        DegreeSpec::Regular { dv: 3, dc: 6 }
    }
}

impl DegreeSpec {
    pub fn resolve(&self) -> Result<DegreeDistribution> {
        let dd = match self {
            DegreeSpec::Regular { dv, dc } => DegreeDistribution::regular(*dv, *dc),
            DegreeSpec::IrregularRateHalf => DegreeDistribution::irregular_rate_half(),
            DegreeSpec::Custom { lambda, rho } => DegreeDistribution::new(lambda.clone(), rho.clone())?,
        };
        dd.validate()?;
        Ok(dd)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeSpec {
    pub family: CodeFamily,
    pub n: usize,
    pub dv: usize,
    pub dc: usize,
    /// Hamming parameter for `wstar3`.
    pub m: usize,
    pub seed: u64,
    pub degrees: DegreeSpec,
    pub path: Option<PathBuf>,
}

impl Default for CodeSpec {
    fn default() -> Self {
        CodeSpec {
            family: CodeFamily::Root,
            n: 400,
            dv: 3,
            dc: 6,
            m: 3,
            seed: 1,
            degrees: DegreeSpec::default(),
            path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSpec {
    pub nc: usize,
    /// Defaults to the rate of the code under test.
    pub rate: Option<f64>,
    pub mode: FadingMode,
    pub es: f64,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec { nc: 2, rate: None, mode: FadingMode::Rayleigh, es: 1.0 }
    }
}

impl ChannelSpec {
    pub fn config(&self, rate: f64, ebn0_db: f64) -> ChannelConfig {
        ChannelConfig {
            nc: self.nc,
            rate: self.rate.unwrap_or(rate),
            ebn0_db,
            mode: self.mode.clone(),
            es: self.es,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub ebn0_db: Vec<f64>,
    pub stop: StopRule,
    pub metric: ErrorMetric,
    /// Fading draws per outage point.
    pub samples: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            ebn0_db: vec![5.0, 10.0, 15.0, 20.0],
            stop: StopRule::default(),
            metric: ErrorMetric::Info,
            samples: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensitySpec {
    pub ensemble: Ensemble,
    pub degrees: DegreeSpec,
    pub de: DeConfig,
    pub tolerance_db: f64,
    pub sampling: FadingSampling,
    pub samples: u64,
    pub boundary_points: usize,
    pub boundary_tol: f64,
    /// When set, `de-wer` evaluates the block-erasure channel instead.
    pub epsilon: Option<f64>,
}

impl Default for DensitySpec {
    fn default() -> Self {
        DensitySpec {
            ensemble: Ensemble::Root,
            degrees: DegreeSpec::default(),
            de: DeConfig::default(),
            tolerance_db: 0.01,
            sampling: FadingSampling::MonteCarlo,
            samples: 10_000,
            boundary_points: 24,
            boundary_tol: 0.01,
            epsilon: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AppendixFunction {
    Chi2Pdf,
    Chi2Cdf,
    Chi2Loss,
    G,
    G4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppendixSpec {
    pub function: AppendixFunction,
    /// χ² weight a (b = 1 − a).
    pub a: f64,
    /// Evaluation points: y or T for χ², a for the loss, α₁ for G.
    pub inputs: Vec<f64>,
    pub alpha2: f64,
    pub sigma2: f64,
}

impl Default for AppendixSpec {
    fn default() -> Self {
        AppendixSpec {
            function: AppendixFunction::Chi2Cdf,
            a: 0.5,
            inputs: vec![0.01, 0.1, 0.5, 1.0, 2.0],
            alpha2: 1.0,
            sigma2: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub code: CodeSpec,
    pub channel: ChannelSpec,
    pub decoder: DecoderConfig,
    pub sweep: SweepSpec,
    pub density: DensitySpec,
    pub appendix: AppendixSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: CommandKind::Analyze,
            seed: 1,
            out: None,
            code: CodeSpec::default(),
            channel: ChannelSpec::default(),
            decoder: DecoderConfig::default(),
            sweep: SweepSpec::default(),
            density: DensitySpec::default(),
            appendix: AppendixSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// The resolved config as `# `-prefixed lines.
    pub fn header(&self) -> Result<String> {
        let mut out = String::new();
        for line in self.to_toml()?.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        Ok(out)
    }
}
