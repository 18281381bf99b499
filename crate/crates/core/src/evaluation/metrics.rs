//! Cost, accuracy, fairness and calibration metrics over decision records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::Demographics;
use crate::decision::{ActionId, Belief, DecisionProblem, StateId};
use crate::orchestrator::EpisodeTrace;

/// Groups smaller than this are left out of parity gaps.
pub const MIN_GROUP_SIZE: usize = 30;
pub const CALIBRATION_BINS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no group has at least {MIN_GROUP_SIZE} members")]
    NoEligibleGroups,
}

/// What any method decided for one candidate, plus the truth needed to score it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub candidate_id: u64,
    pub true_state: StateId,
    pub demographics: Demographics,
    pub action: ActionId,
    pub screened: bool,
    /// Final belief, when the method keeps one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub belief: Option<Belief>,
}

impl From<&EpisodeTrace> for DecisionRecord {
    fn from(t: &EpisodeTrace) -> Self {
        Self {
            candidate_id: t.candidate_id,
            true_state: t.true_state,
            demographics: t.demographics,
            action: t.terminal_action,
            screened: t.screens_taken > 0,
            belief: Some(t.final_belief().clone()),
        }
    }
}

pub fn realized_cost(r: &DecisionRecord, problem: &DecisionProblem) -> f64 {
    problem.cost(r.action, r.true_state) + if r.screened { problem.info_cost() } else { 0.0 }
}

/// Sum of terminal costs plus the price of every screen.
pub fn total_cost(records: &[DecisionRecord], problem: &DecisionProblem) -> f64 {
    records.iter().map(|r| realized_cost(r, problem)).sum()
}

/// Best action per state under perfect information, over all actions
/// including gathering. For the hiring problem this maps the borderline
/// state to the screen.
pub fn perfect_information_actions(problem: &DecisionProblem) -> Vec<ActionId> {
    (0..problem.n_states())
        .map(|s| {
            (0..problem.actions().len())
                .map(ActionId)
                .min_by(|a, b| problem.cost(*a, StateId(s)).total_cmp(&problem.cost(*b, StateId(s))))
                .expect("actions")
        })
        .collect()
}

/// Whether a record matches the perfect-information action. When that action
/// is the gather action, any screened record counts as correct.
pub fn is_correct(r: &DecisionRecord, problem: &DecisionProblem, best: &[ActionId]) -> bool {
    let a = best[r.true_state.0];
    if problem.actions()[a.0].is_terminal() {
        r.action == a
    } else {
        r.screened
    }
}

pub fn decision_accuracy(records: &[DecisionRecord], problem: &DecisionProblem) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let best = perfect_information_actions(problem);
    records.iter().filter(|r| is_correct(r, problem, &best)).count() as f64 / records.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    Gender,
    Ethnicity,
    Intersectional,
}

impl Grouping {
    pub fn key(self, d: &Demographics) -> String {
        match self {
            Self::Gender => format!("gender:{}", d.gender.key()),
            Self::Ethnicity => format!("ethnicity:{}", d.ethnicity.key()),
            Self::Intersectional => format!("{}+{}", d.gender.key(), d.ethnicity.key()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupRate {
    pub rate: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityResult {
    /// Largest pairwise difference in selection rate among eligible groups,
    /// in percentage points.
    pub gap_pp: f64,
    pub rates: BTreeMap<String, GroupRate>,
}

/// Max pairwise difference of rates (fractions), in percentage points.
pub fn parity_gap_from_rates(rates: &[f64]) -> f64 {
    let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
    if rates.is_empty() {
        0.0
    } else {
        100.0 * (hi - lo)
    }
}

/// Selection-rate gap for the `selected` action across groups.
pub fn parity_gap(records: &[DecisionRecord], grouping: Grouping, selected: ActionId) -> Result<ParityResult, MetricsError> {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in records {
        let e = counts.entry(grouping.key(&r.demographics)).or_default();
        e.1 += 1;
        if r.action == selected {
            e.0 += 1;
        }
    }
    let rates: BTreeMap<String, GroupRate> = counts
        .into_iter()
        .map(|(k, (sel, n))| (k, GroupRate { rate: sel as f64 / n as f64, n }))
        .collect();
    let eligible: Vec<f64> = rates.values().filter(|g| g.n >= MIN_GROUP_SIZE).map(|g| g.rate).collect();
    if eligible.is_empty() {
        return Err(MetricsError::NoEligibleGroups);
    }
    Ok(ParityResult { gap_pp: parity_gap_from_rates(&eligible), rates })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lo: f64,
    pub hi: f64,
    pub confidence: f64,
    pub accuracy: f64,
    pub count: usize,
}

/// `(confidence, correct)` for the most probable state of a belief.
pub fn map_prediction(belief: &Belief, truth: StateId) -> (f64, bool) {
    let (s, p) = belief.map_state();
    (p, s == truth)
}

/// Equal-width binned ECE over `(confidence, correct)` pairs.
pub fn expected_calibration_error(items: &[(f64, bool)], bins: usize) -> (f64, Vec<CalibrationBin>) {
    let bins = bins.max(1);
    let mut acc = vec![(0.0f64, 0usize, 0usize); bins];
    for &(c, ok) in items {
        let b = ((c * bins as f64).floor() as usize).min(bins - 1);
        acc[b].0 += c;
        acc[b].1 += ok as usize;
        acc[b].2 += 1;
    }
    let n = items.len().max(1) as f64;
    let mut ece = 0.0;
    let table = acc
        .iter()
        .enumerate()
        .map(|(b, &(csum, hits, count))| {
            let (confidence, accuracy) =
                if count == 0 { (0.0, 0.0) } else { (csum / count as f64, hits as f64 / count as f64) };
            ece += count as f64 / n * (confidence - accuracy).abs();
            CalibrationBin { lo: b as f64 / bins as f64, hi: (b + 1) as f64 / bins as f64, confidence, accuracy, count }
        })
        .collect();
    (ece, table)
}

/// ECE over records that carry a belief; `None` when none do.
pub fn records_ece(records: &[DecisionRecord], bins: usize) -> Option<(f64, Vec<CalibrationBin>)> {
    let items: Vec<(f64, bool)> =
        records.iter().filter_map(|r| r.belief.as_ref().map(|b| map_prediction(b, r.true_state))).collect();
    (!items.is_empty()).then(|| expected_calibration_error(&items, bins))
}
