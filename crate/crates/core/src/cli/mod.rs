//! Batch front end: one experiment per invocation, configured by a TOML file
//! and command-line overrides, with CSV outputs headed by the resolved
//! config.

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::alist::{read_alist, write_alist};
use crate::analysis::{chi2_cdf, chi2_coding_loss_db, chi2_pdf, g4_bound, g_function, Chi2Params};
use crate::channel::{erasure_outage, outage_probability, FadingMode};
use crate::construct::{
    build_random_full_diversity, build_root_irregular, build_root_regular, build_wstar2, build_wstar3,
    is_ml_full_diversity, random_regular_ldpc,
};
use crate::decoder::sim::simulate_wer;
use crate::decoder::{Code, DecoderVariant};
use crate::density::evolution::awgn_threshold;
use crate::density::fading::{de_asymptotic_wer, erasure_asymptotic_wer, AsymptoticOptions, AsymptoticPoint};
use crate::error::{Error, Result};
use crate::gf2::{code_rate, diversity_analysis, singleton_bound, BitMatrix};

pub use config::{AppendixFunction, CodeFamily, CommandKind, DegreeSpec, ExperimentConfig};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "ROOTLDPC_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "rootldpc", version, about = "Full-diversity LDPC codes for block-fading channels")]
pub struct Cli {
    /// Experiment to run; overrides `command` in the config file.
    #[arg(value_enum)]
    pub command: Option<CommandKind>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Output file, or file stem for `construct`. Standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<CodeFamily>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub code_seed: Option<u64>,
    /// Parity-check matrix for the `alist` family.
    #[arg(long)]
    pub alist: Option<PathBuf>,
    /// Comma-separated Eb/N0 list in dB.
    #[arg(long, value_delimiter = ',')]
    pub ebn0: Option<Vec<f64>>,
    /// Switch the channel to block erasures with this probability.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// bp, min-sum, peeling or ml-exhaustive.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub max_trials: Option<u64>,
    #[arg(long)]
    pub min_errors: Option<u64>,
    /// Fading draws for `outage` and `de-wer`.
    #[arg(long)]
    pub samples: Option<u64>,
    /// random or root.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// monte-carlo or quadrature.
    #[arg(long)]
    pub sampling: Option<String>,
    #[arg(long, value_enum)]
    pub function: Option<AppendixFunction>,
}

fn parse_name<T: DeserializeOwned>(what: &str, name: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|_| Error::Config(format!("unknown {what} '{name}'")))
}

/// Load the config file (if any) and apply the flags on top.
pub fn resolve(command: Option<CommandKind>, o: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match &o.config {
        Some(path) => ExperimentConfig::from_toml(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = command {
        cfg.command = c;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if o.out.is_some() {
        cfg.out = o.out.clone();
    }
    if let Some(f) = o.family {
        cfg.code.family = f;
    }
    if let Some(n) = o.n {
        cfg.code.n = n;
    }
    if let Some(s) = o.code_seed {
        cfg.code.seed = s;
    }
    if let Some(p) = &o.alist {
        cfg.code.path = Some(p.clone());
        cfg.code.family = CodeFamily::Alist;
    }
    if let Some(list) = &o.ebn0 {
        cfg.sweep.ebn0_db = list.clone();
    }
    if let Some(eps) = o.epsilon {
        cfg.channel.mode = FadingMode::Erasure { epsilon: eps };
        cfg.density.epsilon = Some(eps);
    }
    if let Some(v) = &o.variant {
        cfg.decoder.variant = parse_name::<DecoderVariant>("decoder variant", v)?;
    }
    if let Some(it) = o.max_iter {
        cfg.decoder.max_iter = it;
    }
    if let Some(t) = o.max_trials {
        cfg.sweep.stop.max_trials = t;
    }
    if let Some(e) = o.min_errors {
        cfg.sweep.stop.min_errors = e;
    }
    if let Some(s) = o.samples {
        cfg.sweep.samples = s;
        cfg.density.samples = s;
    }
    if let Some(e) = &o.ensemble {
        cfg.density.ensemble = parse_name("ensemble", e)?;
    }
    if let Some(s) = &o.sampling {
        cfg.density.sampling = parse_name("sampling", s)?;
    }
    if let Some(f) = o.function {
        cfg.appendix.function = f;
    }
    Ok(cfg)
}

/// Parse arguments, size the worker pool and run.
pub fn main_with_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => e.exit(),
        _ => Error::Config(e.to_string().trim().to_string()),
    })?;
    let cfg = resolve(cli.command, &cli.overrides)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.overrides.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run(&cfg))
}

/// Execute one experiment and write its artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    log::info!("running {:?} with seed {}", cfg.command, cfg.seed);
    match cfg.command {
        CommandKind::Construct => construct(cfg),
        CommandKind::Analyze => emit(cfg, &analyze(cfg)?),
        CommandKind::Simulate => emit(cfg, &simulate(cfg)?),
        CommandKind::Outage => emit(cfg, &outage(cfg)?),
        CommandKind::DeThreshold => emit(cfg, &de_threshold(cfg)?),
        CommandKind::DeWer => emit(cfg, &de_wer(cfg)?),
        CommandKind::Appendix => emit(cfg, &appendix(cfg)?),
    }
}

fn emit(cfg: &ExperimentConfig, body: &str) -> Result<()> {
    let text = format!("{}{}", cfg.header()?, body);
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// A code built from the `code` section, with its root structure when it
/// has one.
struct BuiltCode {
    h: BitMatrix,
    code: Code,
    metadata: Option<crate::construct::root::RootMetadata>,
}

fn build_code(cfg: &ExperimentConfig) -> Result<BuiltCode> {
    let spec = &cfg.code;
    let root = match spec.family {
        CodeFamily::Root => Some(build_root_regular(spec.n, spec.seed)?),
        CodeFamily::RootIrregular => Some(build_root_irregular(spec.n, &spec.degrees.resolve()?, spec.seed)?),
        _ => None,
    };
    if let Some(r) = root {
        return Ok(BuiltCode {
            h: r.h.clone(),
            code: Code::from_root(&r),
            metadata: Some(r.metadata(spec.seed)),
        });
    }
    let h = match spec.family {
        CodeFamily::Random => random_regular_ldpc(spec.n, spec.dv, spec.dc, spec.seed)?,
        CodeFamily::Wstar2 => build_wstar2(spec.n)?,
        CodeFamily::Wstar3 => build_wstar3(spec.m)?,
        CodeFamily::RandomFullDiversity => build_random_full_diversity(spec.n, spec.seed)?,
        CodeFamily::Alist => {
            let path = spec.path.as_ref().ok_or_else(|| Error::Config("family alist needs code.path".into()))?;
            read_alist(std::io::BufReader::new(fs::File::open(path)?))?
        }
        CodeFamily::Root | CodeFamily::RootIrregular => unreachable!(),
    };
    Ok(BuiltCode { code: Code::from_matrix(h.clone(), None)?, h, metadata: None })
}

#[derive(Serialize)]
struct PlainMetadata {
    family: CodeFamily,
    n: usize,
    checks: usize,
    rank: usize,
    seed: u64,
    four_cycles: usize,
}

fn with_extension(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn construct(cfg: &ExperimentConfig) -> Result<()> {
    let built = build_code(cfg)?;
    let stem = cfg.out.clone().unwrap_or_else(|| PathBuf::from("code"));
    write_alist(&built.h, fs::File::create(with_extension(&stem, "alist"))?)?;
    let json = match &built.metadata {
        Some(m) => serde_json::to_string_pretty(m),
        None => serde_json::to_string_pretty(&PlainMetadata {
            family: cfg.code.family,
            n: built.h.cols(),
            checks: built.h.rows(),
            rank: built.h.rank(),
            seed: cfg.code.seed,
            four_cycles: built.h.four_cycles(),
        }),
    }
    .map_err(|e| Error::Config(e.to_string()))?;
    fs::write(with_extension(&stem, "json"), json + "\n")?;
    Ok(())
}

fn analyze(cfg: &ExperimentConfig) -> Result<String> {
    let built = build_code(cfg)?;
    let nc = cfg.channel.nc;
    let rate = code_rate(&built.h);
    let report = diversity_analysis(&built.h, nc)?;
    let mut out = String::new();
    let mut line = |k: &str, v: String| out.push_str(&format!("{k}={v}\n"));
    line("n", built.h.cols().to_string());
    line("checks", built.h.rows().to_string());
    line("rank", built.h.rank().to_string());
    line("rate", format!("{rate:.6}"));
    line("nc", nc.to_string());
    line("diversity", report.d.to_string());
    line("singleton_bound", singleton_bound(rate, nc).to_string());
    line("wstar", report.wstar.to_string());
    line("full_diversity", report.full_diversity().to_string());
    line("min_distance", report.min_distance.map_or("none".into(), |d| d.to_string()));
    line("codewords", report.codewords.to_string());
    if nc == 2 {
        line("ml_full_diversity", is_ml_full_diversity(&built.h, nc)?.to_string());
    }
    line("four_cycles", built.h.four_cycles().to_string());
    Ok(out)
}

fn simulate(cfg: &ExperimentConfig) -> Result<String> {
    let built = build_code(cfg)?;
    let rate = built.code.info_positions().len() as f64 / built.code.n() as f64;
    let ch = cfg.channel.config(rate, cfg.sweep.ebn0_db.first().copied().unwrap_or(0.0));
    let curve = simulate_wer(&built.code, &ch, &cfg.decoder, &cfg.sweep.ebn0_db, &cfg.sweep.stop, cfg.sweep.metric, cfg.seed)?;
    let mut buf = Vec::new();
    curve.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn outage(cfg: &ExperimentConfig) -> Result<String> {
    let rate = cfg.channel.rate.unwrap_or(0.5);
    let nc = cfg.channel.nc;
    let mut out = String::from("ebn0_db,p_out,ci_low,ci_high,samples\n");
    for (k, &db) in cfg.sweep.ebn0_db.iter().enumerate() {
        let ch = cfg.channel.config(rate, db);
        ch.validate()?;
        match ch.mode {
            FadingMode::Erasure { epsilon } => {
                let p = erasure_outage(epsilon, rate, nc);
                out.push_str(&format!("{db},{p:.6e},{p:.6e},{p:.6e},0\n"));
            }
            _ => {
                let seed = cfg.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let e = outage_probability(ch.gamma(), rate, nc, cfg.sweep.samples, seed);
                out.push_str(&format!("{db},{:.6e},{:.6e},{:.6e},{}\n", e.p_out, e.ci_low, e.ci_high, e.samples));
            }
        }
    }
    Ok(out)
}

fn de_threshold(cfg: &ExperimentConfig) -> Result<String> {
    let dd = cfg.density.degrees.resolve()?;
    let r = awgn_threshold(&dd, cfg.density.ensemble, &cfg.density.de, cfg.density.tolerance_db)?;
    let ensemble = serde_json::to_value(r.ensemble).map_err(|e| Error::Config(e.to_string()))?;
    Ok(format!(
        "ensemble,threshold_db,capacity_db,gap_db,ratio_absolute,ratio_gap\n{},{:.4},{:.5},{:.4},{:.4},{:.4}\n",
        ensemble.as_str().unwrap_or_default(),
        r.threshold_db,
        r.capacity_db,
        r.gap_db,
        r.ratio_absolute,
        r.ratio_gap
    ))
}

fn de_wer(cfg: &ExperimentConfig) -> Result<String> {
    let d = &cfg.density;
    let dd = d.degrees.resolve()?;
    if let Some(eps) = d.epsilon {
        let wer = erasure_asymptotic_wer(&dd, d.ensemble, eps, &d.de)?;
        return Ok(format!("epsilon,wer\n{eps},{wer:.6e}\n"));
    }
    let opts = AsymptoticOptions {
        de: d.de,
        sampling: d.sampling,
        samples: d.samples,
        seed: cfg.seed,
        boundary_points: d.boundary_points,
        boundary_tol: d.boundary_tol,
    };
    let points = de_asymptotic_wer(&dd, d.ensemble, &cfg.sweep.ebn0_db, &opts)?;
    let mut out = format!("{}\n", AsymptoticPoint::CSV_HEADER);
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    Ok(out)
}

fn appendix(cfg: &ExperimentConfig) -> Result<String> {
    let a = &cfg.appendix;
    let mut out = String::from("input,value\n");
    for &x in &a.inputs {
        let value = match a.function {
            AppendixFunction::Chi2Pdf => chi2_pdf(x, Chi2Params::new(a.a, 1.0 - a.a)?),
            AppendixFunction::Chi2Cdf => chi2_cdf(x, Chi2Params::new(a.a, 1.0 - a.a)?),
            AppendixFunction::Chi2Loss => chi2_coding_loss_db(Chi2Params::new(x, 1.0 - x)?)?,
            AppendixFunction::G => g_function(x, a.alpha2, a.sigma2)?,
            AppendixFunction::G4 => g4_bound(x, a.alpha2, a.sigma2)?.g4,
        };
        out.push_str(&format!("{x},{value:.10e}\n"));
    }
    Ok(out)
}

