use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use log::{error, info, warn};
use serde::Serialize;

use bayesorch::config::ExperimentConfig;
use bayesorch::datagen::{read_population, sample_population, write_population};
use bayesorch::decision::StateId;
use bayesorch::evaluation::sweep::{cache_evidence, sensitivity_sweep};
use bayesorch::evaluation::{bonferroni, compare, compute_report, run_method, Method, MetricsReport, ReportOptions};
use bayesorch::seed;

use crate::output::{opt, opt3, write_csv, write_json, write_jsonl};

pub fn generate(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let pop = sample_population(cfg.population.n, &cfg.problem, cfg.population.seed)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_population(out, &pop)?;
    println!("wrote {} candidates to {}", pop.len(), out.display());
    for (s, spec) in cfg.problem.states().iter().enumerate() {
        let n = pop.iter().filter(|c| c.true_state == StateId(s)).count();
        println!("  {:<6} {n}", spec.id);
    }
    Ok(())
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    method: &'a str,
    n: usize,
    total_cost: f64,
    cost_ci_lo: f64,
    cost_ci_hi: f64,
    accuracy: f64,
    screens: usize,
    screen_rate: f64,
    parity_gap_gender: Option<f64>,
    parity_gap_ethnicity: Option<f64>,
    parity_gap_overall: Option<f64>,
    ece: Option<f64>,
    failures: usize,
}

impl<'a> From<&'a MetricsReport> for SummaryRow<'a> {
    fn from(r: &'a MetricsReport) -> Self {
        Self {
            method: &r.method,
            n: r.n,
            total_cost: r.total_cost,
            cost_ci_lo: r.cost_ci.lo,
            cost_ci_hi: r.cost_ci.hi,
            accuracy: r.accuracy,
            screens: r.screens,
            screen_rate: r.screen_rate,
            parity_gap_gender: r.parity_gap_gender,
            parity_gap_ethnicity: r.parity_gap_ethnicity,
            parity_gap_overall: r.parity_gap_overall,
            ece: r.ece,
            failures: r.failures,
        }
    }
}

#[derive(Serialize)]
struct RateRow<'a> {
    method: &'a str,
    group: &'a str,
    selection_rate: f64,
    n: usize,
}

#[derive(Serialize)]
struct BinRow<'a> {
    method: &'a str,
    lo: f64,
    hi: f64,
    confidence: f64,
    accuracy: f64,
    count: usize,
}

/// Returns false when any method failed or dropped candidates.
pub fn run(cfg: &ExperimentConfig, corpus: &Path, out: &Path, methods: &[Method], workers: usize) -> Result<bool> {
    let population = read_population(corpus)?;
    let setup = cfg.setup(workers)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stats = &cfg.statistics;
    let mut ok = true;
    let mut done = Vec::new();
    for &m in methods {
        info!("running {m} on {} candidates", population.len());
        let run = match run_method(m, &population, &setup) {
            Ok(r) => r,
            Err(e) => {
                error!("{m}: {e}");
                ok = false;
                continue;
            }
        };
        if !run.failures.is_empty() {
            warn!("{m}: {} candidates failed, first: {}", run.failures.len(), run.failures[0].error);
            ok = false;
        }
        let traces = out.join(format!("{m}.traces.jsonl"));
        if run.traces.is_empty() {
            write_jsonl(&traces, &run.records)?;
        } else {
            write_jsonl(&traces, &run.traces)?;
        }
        let opts = ReportOptions {
            bootstrap_iterations: stats.bootstrap_iterations,
            seed: seed::derive(&[cfg.population.seed, seed::label(m.key())]),
            ..ReportOptions::default()
        };
        let report = compute_report(m.key(), &run, &setup.problem, &opts)?;
        write_json(&out.join(format!("{m}.report.json")), &report)?;
        done.push((m, run, report));
    }

    let reports: Vec<&MetricsReport> = done.iter().map(|(_, _, r)| r).collect();
    write_csv(&out.join("summary.csv"), &reports.iter().map(|r| SummaryRow::from(*r)).collect::<Vec<_>>())?;
    let rates: Vec<RateRow> = reports
        .iter()
        .flat_map(|r| {
            r.per_group_selection_rates.iter().map(|(g, v)| RateRow {
                method: &r.method,
                group: g,
                selection_rate: v.rate,
                n: v.n,
            })
        })
        .collect();
    write_csv(&out.join("selection_rates.csv"), &rates)?;
    let bins: Vec<BinRow> = reports
        .iter()
        .flat_map(|r| {
            r.calibration_bins.iter().map(|b| BinRow {
                method: &r.method,
                lo: b.lo,
                hi: b.hi,
                confidence: b.confidence,
                accuracy: b.accuracy,
                count: b.count,
            })
        })
        .collect();
    write_csv(&out.join("calibration.csv"), &bins)?;

    println!(
        "{:<22} {:>12} {:>23} {:>8} {:>8} {:>9} {:>6}",
        "method", "total cost", "95% CI", "accuracy", "screens", "parity pp", "ECE"
    );
    for r in &reports {
        println!(
            "{:<22} {:>12.0} {:>11.0}-{:<11.0} {:>8.3} {:>8} {:>9} {:>6}",
            r.method,
            r.total_cost,
            r.cost_ci.lo,
            r.cost_ci.hi,
            r.accuracy,
            r.screens,
            opt(r.parity_gap_overall),
            opt3(r.ece)
        );
    }

    if let Some((_, reference, _)) = done.iter().find(|(m, _, _)| *m == Method::Framework) {
        let others: Vec<_> = done.iter().filter(|(m, _, _)| *m != Method::Framework).collect();
        let alpha = bonferroni(stats.alpha, others.len());
        let mut rows = Vec::new();
        for (m, run, _) in others {
            let s = seed::derive(&[cfg.population.seed, seed::label("compare"), seed::label(m.key())]);
            rows.push(compare(
                (Method::Framework.key(), reference),
                (m.key(), run),
                &setup.problem,
                stats.permutation_iterations,
                alpha,
                s,
            )?);
        }
        if !rows.is_empty() {
            write_csv(&out.join("comparison.csv"), &rows)?;
            println!("\npaired permutation tests against framework (alpha {alpha:.4} after Bonferroni)");
            for c in &rows {
                println!(
                    "{:<22} {:>+12.0} p={:<8.4} {}",
                    c.method,
                    c.difference,
                    c.p_value,
                    if c.significant { "significant" } else { "" }
                );
            }
        }
    }
    Ok(ok)
}

pub fn sweep(cfg: &ExperimentConfig, corpus: &Path, out: &Path, parameter: &str, workers: usize) -> Result<()> {
    let param = cfg.sweep.parameter(parameter).with_context(|| format!("unknown sweep parameter {parameter}"))?;
    let population = read_population(corpus)?;
    let setup = cfg.setup(workers)?;
    info!("eliciting evidence for {} candidates", population.len());
    let cache = cache_evidence(&population, &setup.problem, &setup.providers, workers)?;
    let rows = bayesorch::par::with_workers(workers, || {
        sensitivity_sweep(&param, &cache, &setup.problem, &setup.source, &setup.episode, cfg.population.seed)
    })?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(format!("sweep_{parameter}.csv"));
    write_csv(&path, &rows)?;
    println!("{:<14} {:>12} {:>12} {:>8} {:>8}", "setting", "total cost", "own costs", "screens", "flips");
    for r in &rows {
        println!(
            "{:<14} {:>12.0} {:>12.0} {:>8} {:>7.1}%",
            r.setting,
            r.total_cost,
            r.setting_cost,
            r.screens,
            100.0 * r.flip_fraction
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}
