use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bayesorch");

fn bayesorch(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("RUST_LOG", "warn").output().expect("binary runs")
}

fn small_config(dir: &Path, n: usize) -> String {
    let path = dir.join("cfg.toml");
    fs::write(
        &path,
        format!("[population]\nn = {n}\nseed = 5\n\n[statistics]\nbootstrap_iterations = 500\npermutation_iterations = 500\n"),
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

fn corpus(dir: &Path, n: usize) -> (String, String) {
    let cfg = small_config(dir, n);
    let out = dir.join("corpus.jsonl");
    let o = bayesorch(&["generate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (cfg, out.to_str().unwrap().to_string())
}

#[test]
fn generate_default_writes_thousand_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.jsonl");
    let o = bayesorch(&["generate", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1000);
    assert!(String::from_utf8_lossy(&o.stdout).contains("s1"));
}

#[test]
fn generate_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 40);
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        assert!(bayesorch(&["generate", "--config", &cfg, "--out", p.to_str().unwrap()]).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = dir.path().join("c.jsonl");
    bayesorch(&["generate", "--config", &cfg, "--seed", "6", "--out", c.to_str().unwrap()]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn zero_population_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 0);
    let out = dir.path().join("sub").join("c.jsonl");
    let o = bayesorch(&["generate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("population.n"));
    assert!(!dir.path().join("sub").exists());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[population]\nsize = 10\n").unwrap();
    let o = bayesorch(&["--config", cfg.to_str().unwrap(), "generate", "--out", "x.jsonl"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("size"));
}

#[test]
fn run_single_method_writes_one_report() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, corpus) = corpus(dir.path(), 60);
    let out = dir.path().join("run");
    let o = bayesorch(&["run", "--config", &cfg, "--corpus", &corpus, "--out", out.to_str().unwrap(), "--methods", "framework"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let reports: Vec<_> =
        fs::read_dir(&out).unwrap().filter_map(|e| e.ok()).filter(|e| e.file_name().to_string_lossy().ends_with(".report.json")).collect();
    assert_eq!(reports.len(), 1);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("framework.report.json")).unwrap()).unwrap();
    assert_eq!(report["n"], 60);
    assert_eq!(fs::read_to_string(out.join("framework.traces.jsonl")).unwrap().lines().count(), 60);
    assert!(!out.join("comparison.csv").exists());
}

#[test]
fn run_pair_writes_comparison_with_p_value() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, corpus) = corpus(dir.path(), 60);
    let out = dir.path().join("run");
    let o = bayesorch(&[
        "run", "--config", &cfg, "--corpus", &corpus, "--out", out.to_str().unwrap(), "--methods", "framework,never_screen",
    ]);
    assert!(o.status.success());
    let table = fs::read_to_string(out.join("comparison.csv")).unwrap();
    let mut lines = table.lines();
    assert!(lines.next().unwrap().contains("p_value"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("framework,never_screen,60,"));
    assert!(lines.next().is_none());
}

#[test]
fn unknown_method_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, corpus) = corpus(dir.path(), 10);
    let o = bayesorch(&["run", "--config", &cfg, "--corpus", &corpus, "--methods", "framework,oracle"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("oracle"));
}

#[test]
fn missing_corpus_leaves_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = bayesorch(&["run", "--corpus", dir.path().join("nope.jsonl").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.jsonl"));
    assert!(!out.exists());
}

#[test]
fn reports_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, corpus) = corpus(dir.path(), 120);
    let runs: Vec<_> = ["1", "4"]
        .iter()
        .map(|w| {
            let out = dir.path().join(format!("w{w}"));
            let o = bayesorch(&[
                "run", "--config", &cfg, "--corpus", &corpus, "--out", out.to_str().unwrap(), "--workers", w,
                "--methods", "framework,ensemble_vote,calibrated_threshold",
            ]);
            assert!(o.status.success());
            out
        })
        .collect();
    for name in ["framework.report.json", "framework.traces.jsonl", "ensemble_vote.report.json", "comparison.csv", "summary.csv"] {
        assert_eq!(fs::read(runs[0].join(name)).unwrap(), fs::read(runs[1].join(name)).unwrap(), "{name}");
    }
}

#[test]
fn sweeps_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, corpus) = corpus(dir.path(), 80);
    let out = dir.path().join("sweep");
    let o = bayesorch(&["sweep", "--config", &cfg, "--corpus", &corpus, "--out", out.to_str().unwrap(), "--parameter", "cost-scale"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("sweep_cost_scale.csv")).unwrap();
    assert!(table.lines().next().unwrap().contains("flip_fraction"));
    assert_eq!(table.lines().count(), 1 + 1 + 20);

    let o = bayesorch(&["sweep", "--config", &cfg, "--corpus", &corpus, "--out", out.to_str().unwrap(), "--parameter", "rho"]);
    assert!(o.status.success());
    let rho = fs::read_to_string(out.join("sweep_rho.csv")).unwrap();
    let settings: Vec<&str> = rho.lines().skip(2).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(settings, ["rho=0.5", "rho=0.7", "rho=0.9"]);
}

#[test]
fn unknown_sweep_parameter_is_a_usage_error() {
    let o = bayesorch(&["sweep", "--corpus", "c.jsonl", "--parameter", "gamma"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));
}
