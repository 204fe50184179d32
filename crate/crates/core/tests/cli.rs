use std::fs;
use std::process::Command;

use rootldpc::cli::{resolve, CommandKind, ExperimentConfig, Overrides};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rootldpc"));
    cmd.env("ROOTLDPC_WORKERS", "1").env("RUST_LOG", "error");
    cmd
}

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn construct_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let status = bin()
            .args(["construct", "--family", "root", "--n", "16", "--code-seed", "7", "--out"])
            .arg(dir.path().join(name))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(dir.path().join("a.alist")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.alist")).unwrap());
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(meta["n"], 16);
    assert_eq!(meta["seed"], 7);
}

#[test]
fn analyze_reports_wstar() {
    let out = bin().args(["analyze", "--family", "wstar2", "--n", "12"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(body(&text).contains(&"wstar=2"), "{text}");
    assert!(text.starts_with("# command = \"analyze\""));
}

#[test]
fn simulate_erasure_matches_outage() {
    let out = bin()
        .args([
            "simulate", "--family", "root", "--n", "400", "--epsilon", "0.3", "--variant", "peeling", "--ebn0",
            "10", "--max-trials", "20000", "--min-errors", "1000000",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = body(&text);
    assert_eq!(rows[0], "ebn0_db,trials,word_errors,wer,ci_low,ci_high,avg_iterations");
    let fields: Vec<f64> = rows[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert!(fields[4] <= 0.09 && 0.09 <= fields[5], "{}", rows[1]);
}

#[test]
fn csv_bodies_repeat_under_same_seed() {
    let run = || {
        let out = bin()
            .args(["outage", "--ebn0", "5,10", "--samples", "20000", "--seed", "3"])
            .output()
            .unwrap();
        String::from_utf8(out.stdout).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert!(a.contains("# seed = 3"));
    assert_eq!(body(&a)[0], "ebn0_db,p_out,ci_low,ci_high,samples");
}

#[test]
fn errors_are_machine_readable() {
    let out = bin().args(["analyze", "--variant", "turbo"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error kind=config message="), "{err}");

    let out = bin().args(["construct", "--family", "root", "--n", "10", "--out", "/nonexistent/x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error kind=dimension"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    fs::write(
        &path,
        "command = \"de-threshold\"\nseed = 9\n[code]\nn = 800\n[density]\nensemble = \"random\"\n[density.degrees]\nkind = \"irregular-rate-half\"\n",
    )
    .unwrap();
    let o = Overrides { config: Some(path), seed: Some(11), ..Default::default() };
    let cfg = resolve(None, &o).unwrap();
    assert_eq!(cfg.command, CommandKind::DeThreshold);
    assert_eq!(cfg.seed, 11);
    assert_eq!(cfg.code.n, 800);
    let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn unknown_config_keys_are_rejected() {
    assert!(ExperimentConfig::from_toml("[code]\nlength = 4\n").is_err());
}

#[test]
fn appendix_emits_input_value_rows() {
    let out = bin().args(["appendix", "--function", "chi2-cdf"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = body(&text);
    assert_eq!(rows[0], "input,value");
    let at = |x: &str| -> f64 { rows.iter().find(|r| r.starts_with(&format!("{x},"))).unwrap()[x.len() + 1..].parse().unwrap() };
    assert!((at("0.1") - 0.01752).abs() < 1e-5);
}
