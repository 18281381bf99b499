//! Value of information and the gather/stop gate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{bayes_update, select_action, Belief, DecisionError, DecisionProblem, LikelihoodVector, StateId, PROB_TOL};
use crate::ensemble::LikelihoodPanel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VoiError {
    #[error("inconsistent outcome model: {0}")]
    InconsistentModel(String),
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

/// Conditional outcome distribution `p(z|s)`, one row per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeModel(Vec<Vec<f64>>);

impl OutcomeModel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, VoiError> {
        let bad = |m: String| Err(VoiError::InconsistentModel(m));
        let Some(n_out) = rows.first().map(Vec::len) else {
            return bad("no rows".into());
        };
        if n_out == 0 {
            return bad("empty outcome alphabet".into());
        }
        for (s, row) in rows.iter().enumerate() {
            if row.len() != n_out {
                return bad(format!("row {s} has {} outcomes, expected {n_out}", row.len()));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return bad(format!("row {s} has a negative or non-finite entry"));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return bad(format!("row {s} sums to {total}"));
            }
        }
        Ok(Self(rows))
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn n_outcomes(&self) -> usize {
        self.0[0].len()
    }

    /// `p(z|s)` as a likelihood vector over states, for every outcome `z`.
    pub fn likelihood_map(&self) -> Vec<LikelihoodVector> {
        (0..self.n_outcomes())
            .map(|z| {
                LikelihoodVector::new(self.0.iter().map(|row| row[z]).collect())
                    .expect("probabilities lie in [0, 1]")
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoSource {
    pub name: String,
    pub cost: f64,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_model: Option<OutcomeModel>,
}

impl InfoSource {
    pub fn new(name: impl Into<String>, cost: f64, rho: f64) -> Result<Self, VoiError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(VoiError::InconsistentModel(format!("rho {rho} outside [0, 1]")));
        }
        if !cost.is_finite() || cost < 0.0 {
            return Err(VoiError::InconsistentModel(format!("cost {cost} must be >= 0")));
        }
        Ok(Self { name: name.into(), cost, rho, outcome_model: None })
    }

    pub fn with_outcome_model(mut self, model: OutcomeModel) -> Self {
        self.outcome_model = Some(model);
        self
    }

    /// The phone screen: one gather opportunity at the problem's info cost.
    pub fn phone_screen(problem: &DecisionProblem, rho: f64) -> Result<Self, VoiError> {
        Self::new("phone_screen", problem.info_cost(), rho)
    }
}

/// Expected cost of acting now and of acting with the state revealed.
pub fn current_and_perfect(belief: &Belief, problem: &DecisionProblem) -> (f64, f64) {
    let (_, current) = select_action(belief, problem);
    let perfect = belief
        .probs()
        .iter()
        .enumerate()
        .map(|(s, p)| p * problem.perfect_cost(StateId(s)))
        .sum();
    (current, perfect)
}

/// `rho * (C_current - C_perfect)`.
pub fn voi_approx(belief: &Belief, problem: &DecisionProblem, source: &InfoSource) -> f64 {
    let (current, perfect) = current_and_perfect(belief, problem);
    (source.rho * (current - perfect)).max(0.0)
}

/// Exact one-step value of information by enumerating outcomes.
pub fn voi_exact(
    belief: &Belief,
    problem: &DecisionProblem,
    source: &InfoSource,
    likelihood_map: &[LikelihoodVector],
) -> Result<f64, VoiError> {
    let model = source
        .outcome_model
        .as_ref()
        .ok_or_else(|| VoiError::InconsistentModel("source has no outcome model".into()))?;
    if model.rows().len() != belief.len() {
        return Err(VoiError::InconsistentModel(format!(
            "{} rows for {} states",
            model.rows().len(),
            belief.len()
        )));
    }
    if likelihood_map.len() != model.n_outcomes() {
        return Err(VoiError::InconsistentModel(format!(
            "{} likelihood vectors for {} outcomes",
            likelihood_map.len(),
            model.n_outcomes()
        )));
    }
    let (_, current) = select_action(belief, problem);
    let mut expected = 0.0;
    for (z, lik) in likelihood_map.iter().enumerate() {
        let pz: f64 = belief.probs().iter().zip(model.rows()).map(|(b, row)| b * row[z]).sum();
        if pz <= 0.0 {
            continue;
        }
        let post = bayes_update(belief, lik)?;
        expected += pz * select_action(&post, problem).1;
    }
    Ok(current - expected)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDecision {
    pub gather: bool,
    pub voi: f64,
    pub source_cost: f64,
    pub max_disagreement: f64,
    pub disagreement_gate: bool,
    pub voi_gate: bool,
}

/// Gather iff disagreement exceeds `tau_d` and VOI exceeds the source cost.
pub fn should_gather(
    panel: &LikelihoodPanel,
    belief: &Belief,
    problem: &DecisionProblem,
    source: &InfoSource,
    tau_d: f64,
) -> GateDecision {
    let voi = voi_approx(belief, problem, source);
    gate(panel.max_disagreement, voi, source.cost, tau_d)
}

pub(crate) fn gate(max_disagreement: f64, voi: f64, cost: f64, tau_d: f64) -> GateDecision {
    let disagreement_gate = max_disagreement > tau_d;
    let voi_gate = voi > cost;
    GateDecision {
        gather: disagreement_gate && voi_gate,
        voi,
        source_cost: cost,
        max_disagreement,
        disagreement_gate,
        voi_gate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{binary_hiring_problem, hiring_problem};
    use crate::ensemble::build_panel;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn b(v: &[f64]) -> Belief {
        Belief::new(v.to_vec()).unwrap()
    }

    fn binary() -> DecisionProblem {
        binary_hiring_problem(40_000.0, 2_500.0, 0.5).unwrap()
    }

    #[test]
    fn approx_examples() {
        let p = binary();
        let src = InfoSource::new("screen", 150.0, 0.7).unwrap();
        assert_eq!(voi_approx(&b(&[1.0, 0.0]), &p, &src), 0.0);
        assert_abs_diff_eq!(voi_approx(&b(&[0.5, 0.5]), &p, &src), 875.0, epsilon = 1e-9);
        let blind = InfoSource::new("screen", 150.0, 0.0).unwrap();
        assert_eq!(voi_approx(&b(&[0.3, 0.7]), &p, &blind), 0.0);
    }

    #[test]
    fn exact_uninformative_and_revealing() {
        let p = hiring_problem();
        let belief = b(&[0.4, 0.3, 0.2, 0.1]);
        let flat = OutcomeModel::new(vec![vec![0.3, 0.7]; 4]).unwrap();
        let src = InfoSource::new("s", 150.0, 1.0).unwrap().with_outcome_model(flat.clone());
        assert_abs_diff_eq!(voi_exact(&belief, &p, &src, &flat.likelihood_map()).unwrap(), 0.0, epsilon = 1e-9);

        let eye: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let eye = OutcomeModel::new(eye).unwrap();
        let src = InfoSource::new("s", 150.0, 1.0).unwrap().with_outcome_model(eye.clone());
        let (cur, perf) = current_and_perfect(&belief, &p);
        let exact = voi_exact(&belief, &p, &src, &eye.likelihood_map()).unwrap();
        assert_abs_diff_eq!(exact, cur - perf, epsilon = 1e-9);
        assert_abs_diff_eq!(exact, voi_approx(&belief, &p, &src), epsilon = 1e-9);
    }

    #[test]
    fn exact_two_outcome_source() {
        let p = binary();
        let model = OutcomeModel::new(vec![vec![0.1, 0.9], vec![0.8, 0.2]]).unwrap();
        let src = InfoSource::new("s", 150.0, 0.7).unwrap().with_outcome_model(model.clone());
        let got = voi_exact(&b(&[0.9, 0.1]), &p, &src, &model.likelihood_map()).unwrap();
        // Acting now: interview at 0.9 * 2500. After "hi": interview, paying
        // 0.09 * 2500. After "lo": reject, paying 0.02 * 40000.
        let want = 0.9 * 2500.0 - (0.09 * 2500.0 + 0.02 * 40000.0);
        assert_abs_diff_eq!(got, want, epsilon = 1e-9);
        assert_abs_diff_eq!(got, 1225.0, epsilon = 1e-9);
    }

    #[test]
    fn inconsistent_models() {
        assert!(OutcomeModel::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(OutcomeModel::new(vec![vec![0.5, 0.5], vec![1.0]]).is_err());
        let p = binary();
        let src = InfoSource::new("s", 1.0, 0.5).unwrap();
        assert!(matches!(voi_exact(&b(&[0.5, 0.5]), &p, &src, &[]), Err(VoiError::InconsistentModel(_))));
        let model = OutcomeModel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let src = src.with_outcome_model(model.clone());
        assert!(matches!(
            voi_exact(&b(&[0.5, 0.5]), &p, &src, &model.likelihood_map()[..1]),
            Err(VoiError::InconsistentModel(_))
        ));
    }

    #[test]
    fn gate_examples() {
        let p = binary();
        let src = InfoSource::new("screen", 150.0, 0.7).unwrap();
        let calm = build_panel(vec![vec![0.5, 0.5], vec![0.5, 0.55], vec![0.5, 0.5]]).unwrap();
        assert!(calm.max_disagreement < 0.15);
        let d = should_gather(&calm, &b(&[0.5, 0.5]), &p, &src, 0.15);
        assert!(!d.gather && d.voi_gate && !d.disagreement_gate);

        let g = gate(0.3, 875.0, 150.0, 0.15);
        assert!(g.gather);
        let g = gate(0.3, 100.0, 150.0, 0.15);
        assert!(!g.gather && g.disagreement_gate && !g.voi_gate);
        let g = gate(0.05, 875.0, 150.0, 0.15);
        assert!(!g.gather);
    }

    fn belief4() -> impl Strategy<Value = Belief> {
        proptest::collection::vec(0.0f64..1.0, 4)
            .prop_filter("non-zero", |w| w.iter().sum::<f64>() > 1e-6)
            .prop_map(|w| Belief::from_weights(&w).unwrap())
    }

    fn model4() -> impl Strategy<Value = OutcomeModel> {
        (1usize..5)
            .prop_flat_map(|k| proptest::collection::vec(proptest::collection::vec(0.01f64..1.0, k), 4))
            .prop_map(|rows| {
                OutcomeModel::new(
                    rows.into_iter()
                        .map(|r| {
                            let z: f64 = r.iter().sum();
                            let mut r: Vec<f64> = r.iter().map(|x| x / z).collect();
                            let fix = 1.0 - r.iter().sum::<f64>();
                            r[0] += fix;
                            r
                        })
                        .collect(),
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn approx_monotone_in_rho(belief in belief4(), r1 in 0.0f64..=1.0, r2 in 0.0f64..=1.0) {
            let p = hiring_problem();
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let a = voi_approx(&belief, &p, &InfoSource::new("s", 0.0, lo).unwrap());
            let c = voi_approx(&belief, &p, &InfoSource::new("s", 0.0, hi).unwrap());
            prop_assert!(a <= c);
        }

        #[test]
        fn exact_is_nonnegative(belief in belief4(), model in model4()) {
            let p = hiring_problem();
            let src = InfoSource::new("s", 0.0, 1.0).unwrap().with_outcome_model(model.clone());
            prop_assert!(voi_exact(&belief, &p, &src, &model.likelihood_map()).unwrap() >= -1e-9);
        }
    }
}
