//! Metrics, baselines, ablations, significance tests and sensitivity sweeps.

pub mod baselines;
pub mod experiment;
pub mod metrics;
pub mod stats;
pub mod sweep;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::decision::{ActionId, DecisionProblem};

pub use experiment::{run_method, ExperimentError, ExperimentSetup, Method, MethodRun};
pub use metrics::{
    decision_accuracy, expected_calibration_error, parity_gap, total_cost, CalibrationBin, DecisionRecord, Grouping,
    GroupRate, MetricsError,
};
pub use stats::{bonferroni, bootstrap_total_ci, paired_permutation_test, spearman, Interval, StatsError};

pub const BOOTSTRAP_ITERATIONS: usize = 10_000;
pub const PERMUTATION_ITERATIONS: usize = 10_000;
pub const CONFIDENCE_LEVEL: f64 = 0.95;
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: String,
    pub n: usize,
    pub total_cost: f64,
    pub accuracy: f64,
    pub screens: usize,
    pub screen_rate: f64,
    /// Gaps in percentage points; `None` when no group reaches the minimum size.
    pub parity_gap_gender: Option<f64>,
    pub parity_gap_ethnicity: Option<f64>,
    /// Larger of the gender and ethnicity gaps.
    pub parity_gap_overall: Option<f64>,
    /// Interview rate of each gender+ethnicity cell minus the overall rate,
    /// in percentage points, for cells with enough members.
    pub intersectional_gaps: BTreeMap<String, f64>,
    /// `None` for methods that keep no belief.
    pub ece: Option<f64>,
    pub calibration_bins: Vec<CalibrationBin>,
    pub cost_ci: Interval,
    pub per_group_selection_rates: BTreeMap<String, GroupRate>,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrated_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub bootstrap_iterations: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { bootstrap_iterations: BOOTSTRAP_ITERATIONS, level: CONFIDENCE_LEVEL, seed: 0 }
    }
}

fn selected_action(problem: &DecisionProblem) -> ActionId {
    problem.action_by_name("interview").unwrap_or_else(|| {
        problem.terminal_actions().last().expect("problem has a terminal action")
    })
}

pub fn compute_report(
    method: &str,
    run: &MethodRun,
    problem: &DecisionProblem,
    opts: &ReportOptions,
) -> Result<MetricsReport, StatsError> {
    let records = &run.records;
    let interview = selected_action(problem);
    let costs: Vec<f64> = records.iter().map(|r| metrics::realized_cost(r, problem)).collect();
    let gap = |g| parity_gap(records, g, interview).ok();
    let gender = gap(Grouping::Gender);
    let ethnicity = gap(Grouping::Ethnicity);
    let mut rates = BTreeMap::new();
    for p in [&gender, &ethnicity].into_iter().flatten() {
        rates.extend(p.rates.clone());
    }
    let overall_rate = records.iter().filter(|r| r.action == interview).count() as f64 / records.len().max(1) as f64;
    let intersectional_gaps = gap(Grouping::Intersectional)
        .map(|p| {
            p.rates
                .into_iter()
                .filter(|(_, g)| g.n >= metrics::MIN_GROUP_SIZE)
                .map(|(k, g)| (k, 100.0 * (g.rate - overall_rate)))
                .collect()
        })
        .unwrap_or_default();
    let (ece, calibration_bins) = match metrics::records_ece(records, metrics::CALIBRATION_BINS) {
        Some((e, b)) => (Some(e), b),
        None => (None, Vec::new()),
    };
    let screens = records.iter().filter(|r| r.screened).count();
    let gender_gap = gender.map(|p| p.gap_pp);
    let ethnicity_gap = ethnicity.map(|p| p.gap_pp);
    Ok(MetricsReport {
        method: method.to_string(),
        n: records.len(),
        total_cost: costs.iter().sum(),
        accuracy: decision_accuracy(records, problem),
        screens,
        screen_rate: screens as f64 / records.len().max(1) as f64,
        parity_gap_gender: gender_gap,
        parity_gap_ethnicity: ethnicity_gap,
        parity_gap_overall: match (gender_gap, ethnicity_gap) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0.0).max(b.unwrap_or(0.0))),
        },
        intersectional_gaps,
        ece,
        calibration_bins,
        cost_ci: bootstrap_total_ci(&costs, opts.bootstrap_iterations, opts.level, opts.seed)?,
        per_group_selection_rates: rates,
        failures: run.failures.len(),
        calibrated_threshold: run.calibrated_threshold,
    })
}

/// One row of the method comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reference: String,
    pub method: String,
    /// Candidates present in both runs.
    pub n: usize,
    pub reference_cost: f64,
    pub method_cost: f64,
    pub difference: f64,
    pub p_value: f64,
    pub significant: bool,
}

/// Paired permutation test of `other` against `reference` over the candidates
/// both runs decided. `alpha` should already be corrected for multiplicity.
pub fn compare(
    reference: (&str, &MethodRun),
    other: (&str, &MethodRun),
    problem: &DecisionProblem,
    iterations: usize,
    alpha: f64,
    seed: u64,
) -> Result<Comparison, StatsError> {
    let other_costs: HashMap<u64, f64> =
        other.1.records.iter().map(|r| (r.candidate_id, metrics::realized_cost(r, problem))).collect();
    let (a, b): (Vec<f64>, Vec<f64>) = reference
        .1
        .records
        .iter()
        .filter_map(|r| other_costs.get(&r.candidate_id).map(|o| (metrics::realized_cost(r, problem), *o)))
        .unzip();
    if a.is_empty() {
        return Err(StatsError::Empty);
    }
    let p_value = paired_permutation_test(&a, &b, iterations, seed)?;
    let (ra, rb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    Ok(Comparison {
        reference: reference.0.to_string(),
        method: other.0.to_string(),
        n: a.len(),
        reference_cost: ra,
        method_cost: rb,
        difference: rb - ra,
        p_value,
        significant: p_value < alpha,
    })
}
