//! Discriminative baselines: one 0-10 quality score per resume, thresholded.

use serde::{Deserialize, Serialize};

use crate::datagen::Candidate;
use crate::decision::{ActionId, DecisionProblem};
use crate::elicitation::{ElicitError, Observation, Provider};

use super::metrics::{total_cost, DecisionRecord};

pub const FIXED_THRESHOLD: f64 = 7.0;
pub const VOTE_THRESHOLD: f64 = 7.0;
pub const VOTES_NEEDED: usize = 3;
pub const AVERAGE_THRESHOLD: f64 = 6.5;

/// Candidate thresholds for the calibrated baseline: 5.0, 5.1, ..., 8.0.
pub fn calibration_grid() -> Vec<f64> {
    (0..=30).map(|i| 5.0 + i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaselineRule {
    /// Interview when the first provider's score is at least `threshold`.
    Threshold { threshold: f64 },
    /// Interview when at least `needed` providers score at least `threshold`.
    /// Providers that fell back abstain; a non-majority is a reject.
    Vote { threshold: f64, needed: usize },
    /// Interview when the mean score across providers is at least `threshold`.
    Average { threshold: f64 },
}

/// Scores per provider for one candidate, with the fallback flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub candidate_id: u64,
    pub scores: Vec<(f64, bool)>,
}

pub fn score_candidates(candidates: &[Candidate], providers: &[Provider]) -> Result<Vec<ScoredCandidate>, ElicitError> {
    crate::par::map(candidates, |c| {
        let obs = Observation::resume(c);
        let scores = providers.iter().map(|p| p.elicit_quality(&obs)).collect::<Result<_, _>>()?;
        Ok(ScoredCandidate { candidate_id: c.id, scores })
    })
    .into_iter()
    .collect()
}

/// True for interview.
pub fn apply_rule(rule: &BaselineRule, scores: &[(f64, bool)]) -> bool {
    match *rule {
        BaselineRule::Threshold { threshold } => scores.first().is_some_and(|(s, _)| *s >= threshold),
        BaselineRule::Vote { threshold, needed } => {
            let yes = scores.iter().filter(|(s, fb)| !fb && *s >= threshold).count();
            let voting = scores.iter().filter(|(_, fb)| !fb).count();
            yes >= needed && 2 * yes > voting
        }
        BaselineRule::Average { threshold } => {
            !scores.is_empty() && scores.iter().map(|(s, _)| s).sum::<f64>() / scores.len() as f64 >= threshold
        }
    }
}

/// Terminal actions used by the baselines, looked up by name.
#[derive(Debug, Clone, Copy)]
pub struct BinaryActions {
    pub reject: ActionId,
    pub interview: ActionId,
}

impl BinaryActions {
    pub fn of(problem: &DecisionProblem) -> Option<Self> {
        Some(Self { reject: problem.action_by_name("reject")?, interview: problem.action_by_name("interview")? })
    }
}

pub fn decide_all(
    rule: &BaselineRule,
    candidates: &[Candidate],
    scored: &[ScoredCandidate],
    actions: BinaryActions,
) -> Vec<DecisionRecord> {
    candidates
        .iter()
        .zip(scored)
        .map(|(c, sc)| DecisionRecord {
            candidate_id: c.id,
            true_state: c.true_state,
            demographics: c.demographics,
            action: if apply_rule(rule, &sc.scores) { actions.interview } else { actions.reject },
            screened: false,
            belief: None,
        })
        .collect()
}

/// Threshold from `grid` with the lowest validation cost; ties go to the
/// lower threshold.
pub fn calibrate_threshold(
    grid: &[f64],
    validation: &[Candidate],
    scored: &[ScoredCandidate],
    problem: &DecisionProblem,
    actions: BinaryActions,
) -> f64 {
    let mut best = (f64::INFINITY, grid.first().copied().unwrap_or(FIXED_THRESHOLD));
    for &t in grid {
        let records = decide_all(&BaselineRule::Threshold { threshold: t }, validation, scored, actions);
        let cost = total_cost(&records, problem);
        if cost < best.0 {
            best = (cost, t);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_examples() {
        assert!(apply_rule(&BaselineRule::Threshold { threshold: 7.0 }, &[(7.2, false)]));
        assert!(!apply_rule(&BaselineRule::Threshold { threshold: 7.0 }, &[(6.9, false)]));
        let vote = BaselineRule::Vote { threshold: 7.0, needed: 3 };
        let tie = [(8.0, false), (8.0, false), (3.0, false), (3.0, false), (5.0, true)];
        assert!(!apply_rule(&vote, &tie));
        let three = [(8.0, false), (8.0, false), (7.0, false), (3.0, false), (3.0, false)];
        assert!(apply_rule(&vote, &three));
        assert!(apply_rule(&BaselineRule::Average { threshold: 6.5 }, &[(7.0, false); 5]));
        assert!(!apply_rule(&BaselineRule::Average { threshold: 6.5 }, &[]));
    }

    #[test]
    fn grid_spans_five_to_eight() {
        let g = calibration_grid();
        assert_eq!(g.len(), 31);
        assert_eq!(g[0], 5.0);
        assert!((g[30] - 8.0).abs() < 1e-12);
    }
}
