//! Decision problems, beliefs and Bayesian updating.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that a probability vector sums to one.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecisionError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid belief: {0}")]
    InvalidBelief(String),
    #[error("invalid likelihood: {0}")]
    InvalidLikelihood(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evidence has zero probability under the current belief")]
    ZeroEvidence,
    #[error("unknown action index {0}")]
    UnknownAction(usize),
    #[error("cost matrix makes both actions identical")]
    DegenerateCosts,
    #[error("threshold needs exactly two states and two terminal actions")]
    NotBinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Terminal,
    Gather,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub id: String,
    pub kind: ActionKind,
}

impl ActionSpec {
    pub fn terminal(id: impl Into<String>) -> Self {
        Self { id: id.into(), kind: ActionKind::Terminal }
    }

    pub fn gather(id: impl Into<String>) -> Self {
        Self { id: id.into(), kind: ActionKind::Gather }
    }

    pub fn is_terminal(&self) -> bool {
        self.kind == ActionKind::Terminal
    }
}

/// A probability vector over the states of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(probs: Vec<f64>) -> Result<Self, DecisionError> {
        if probs.is_empty() {
            return Err(DecisionError::InvalidBelief("empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0) {
            return Err(DecisionError::InvalidBelief(format!("entry {p} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(DecisionError::InvalidBelief(format!("sums to {total}")));
        }
        Ok(Self(probs))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform belief over zero states");
        Self(vec![1.0 / n as f64; n])
    }

    /// Normalizes non-negative weights into a belief.
    pub fn from_weights(weights: &[f64]) -> Result<Self, DecisionError> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(DecisionError::InvalidBelief("weights must be finite and >= 0".into()));
        }
        let z: f64 = weights.iter().sum();
        if z <= 0.0 {
            return Err(DecisionError::ZeroEvidence);
        }
        let mut probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
        renormalize(&mut probs);
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index and probability of the most probable state (lowest index on ties).
    pub fn map_state(&self) -> (StateId, f64) {
        let mut best = (0, self.0[0]);
        for (i, &p) in self.0.iter().enumerate().skip(1) {
            if p > best.1 {
                best = (i, p);
            }
        }
        (StateId(best.0), best.1)
    }
}

impl TryFrom<Vec<f64>> for Belief {
    type Error = DecisionError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Belief::new(v)
    }
}

impl From<Belief> for Vec<f64> {
    fn from(b: Belief) -> Self {
        b.0
    }
}

// Division by the sum can leave the total a few ulps away from one; fold the
// residual into the largest entry so the result passes the strict check.
fn renormalize(probs: &mut [f64]) {
    let total: f64 = probs.iter().sum();
    let resid = 1.0 - total;
    if resid != 0.0 {
        let (imax, _) = probs
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
        probs[imax] = (probs[imax] + resid).clamp(0.0, 1.0);
    }
}

/// Per-state likelihood estimates, each in [0, 1]. Not a distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LikelihoodVector(Vec<f64>);

impl LikelihoodVector {
    pub fn new(values: Vec<f64>) -> Result<Self, DecisionError> {
        if values.is_empty() {
            return Err(DecisionError::InvalidLikelihood("empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(DecisionError::InvalidLikelihood(format!("entry {v} outside [0, 1]")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for LikelihoodVector {
    type Error = DecisionError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        LikelihoodVector::new(v)
    }
}

impl From<LikelihoodVector> for Vec<f64> {
    fn from(l: LikelihoodVector) -> Self {
        l.0
    }
}

/// States, actions, a cost matrix indexed `(action, state)`, a prior and the
/// price of one information-gathering action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct DecisionProblem {
    states: Vec<StateSpec>,
    actions: Vec<ActionSpec>,
    cost: Vec<Vec<f64>>,
    prior: Belief,
    info_cost: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    pub states: Vec<StateSpec>,
    pub actions: Vec<ActionSpec>,
    pub cost: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
    pub info_cost: f64,
}

impl TryFrom<RawProblem> for DecisionProblem {
    type Error = DecisionError;
    fn try_from(r: RawProblem) -> Result<Self, Self::Error> {
        let prior = Belief::new(r.prior)?;
        DecisionProblem::new(r.states, r.actions, r.cost, prior, r.info_cost)
    }
}

impl From<DecisionProblem> for RawProblem {
    fn from(p: DecisionProblem) -> Self {
        RawProblem {
            states: p.states,
            actions: p.actions,
            cost: p.cost,
            prior: p.prior.into(),
            info_cost: p.info_cost,
        }
    }
}

fn has_duplicates<'a>(ids: impl Iterator<Item = &'a str>) -> bool {
    let mut seen = std::collections::HashSet::new();
    ids.into_iter().any(|id| !seen.insert(id))
}

impl DecisionProblem {
    pub fn new(
        states: Vec<StateSpec>,
        actions: Vec<ActionSpec>,
        cost: Vec<Vec<f64>>,
        prior: Belief,
        info_cost: f64,
    ) -> Result<Self, DecisionError> {
        let bad = |m: &str| Err(DecisionError::InvalidProblem(m.to_string()));
        if states.is_empty() || actions.is_empty() {
            return bad("states and actions must be non-empty");
        }
        if has_duplicates(states.iter().map(|s| s.id.as_str())) {
            return bad("duplicate state id");
        }
        if has_duplicates(actions.iter().map(|a| a.id.as_str())) {
            return bad("duplicate action id");
        }
        if !actions.iter().any(ActionSpec::is_terminal) {
            return bad("at least one terminal action is required");
        }
        if cost.len() != actions.len() {
            return Err(DecisionError::DimensionMismatch { expected: actions.len(), got: cost.len() });
        }
        for row in &cost {
            if row.len() != states.len() {
                return Err(DecisionError::DimensionMismatch { expected: states.len(), got: row.len() });
            }
            if row.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return bad("costs must be finite and non-negative");
            }
        }
        if prior.len() != states.len() {
            return Err(DecisionError::DimensionMismatch { expected: states.len(), got: prior.len() });
        }
        if !info_cost.is_finite() || info_cost < 0.0 {
            return bad("info_cost must be finite and non-negative");
        }
        Ok(Self { states, actions, cost, prior, info_cost })
    }

    pub fn states(&self) -> &[StateSpec] {
        &self.states
    }

    pub fn actions(&self) -> &[ActionSpec] {
        &self.actions
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    pub fn info_cost(&self) -> f64 {
        self.info_cost
    }

    pub fn cost(&self, action: ActionId, state: StateId) -> f64 {
        self.cost[action.0][state.0]
    }

    pub fn cost_row(&self, action: ActionId) -> &[f64] {
        &self.cost[action.0]
    }

    pub fn terminal_actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.actions
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_terminal())
            .map(|(i, _)| ActionId(i))
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.id == name).map(ActionId)
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.id == name).map(StateId)
    }

    /// Same problem with a different prior.
    pub fn with_prior(&self, prior: Belief) -> Result<Self, DecisionError> {
        Self::new(self.states.clone(), self.actions.clone(), self.cost.clone(), prior, self.info_cost)
    }

    /// Same problem with every cost (including the info cost) multiplied
    /// entrywise by `factor(action, state)`.
    pub fn with_scaled_costs(
        &self,
        mut factor: impl FnMut(ActionId, StateId) -> f64,
        info_factor: f64,
    ) -> Result<Self, DecisionError> {
        let cost = self
            .cost
            .iter()
            .enumerate()
            .map(|(a, row)| {
                row.iter().enumerate().map(|(s, c)| c * factor(ActionId(a), StateId(s))).collect()
            })
            .collect();
        Self::new(
            self.states.clone(),
            self.actions.clone(),
            cost,
            self.prior.clone(),
            self.info_cost * info_factor,
        )
    }

    /// Lowest cost achievable in `state` by any terminal action.
    pub fn perfect_cost(&self, state: StateId) -> f64 {
        self.terminal_actions()
            .map(|a| self.cost(a, state))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Four-state hiring problem: reject, phone screen (gather), interview.
pub fn hiring_problem() -> DecisionProblem {
    let states = vec![
        StateSpec {
            id: "s1".into(),
            description: "Clear Reject (s1): Lacks basic qualifications. No relevant degree or less than 1 year relevant experience or major red flags (large unexplained employment gaps, inconsistencies, fundamental skill mismatches).".into(),
        },
        StateSpec {
            id: "s2".into(),
            description: "Phone Screen (s2): Borderline qualifications. Some relevant experience but significant gaps or concerns needing verification (non-traditional background, career switcher, unclear technical depth, or inconsistencies requiring clarification).".into(),
        },
        StateSpec {
            id: "s3".into(),
            description: "Interview (s3): Qualified candidate meeting standard requirements. Relevant degree (CS or related), 2+ years relevant industry experience, demonstrated technical competency, appropriate for cultural fit and depth assessment.".into(),
        },
        StateSpec {
            id: "s4".into(),
            description: "Strong Hire (s4): Exceptional candidate exceeding standard qualifications. Top-tier education (elite CS program) and/or senior experience (5+ years at major companies), rare specialized skills, publications/major open-source contributions, leadership experience.".into(),
        },
    ];
    let actions = vec![
        ActionSpec::terminal("reject"),
        ActionSpec::gather("phone_screen"),
        ActionSpec::terminal("interview"),
    ];
    let cost = vec![
        vec![0.0, 5_000.0, 20_000.0, 40_000.0],
        vec![150.0; 4],
        vec![2_500.0, 2_500.0, 0.0, 0.0],
    ];
    let prior = Belief::new(vec![0.65, 0.25, 0.08, 0.02]).expect("static prior");
    DecisionProblem::new(states, actions, cost, prior, 150.0).expect("static problem")
}

/// Two-state reject/interview problem with the given costs.
/// `c_reject_qualified` is paid for rejecting a qualified candidate and
/// `c_interview_unqualified` for interviewing an unqualified one.
pub fn binary_hiring_problem(
    c_reject_qualified: f64,
    c_interview_unqualified: f64,
    p_qualified: f64,
) -> Result<DecisionProblem, DecisionError> {
    let states = vec![
        StateSpec { id: "unqualified".into(), description: "Unqualified candidate.".into() },
        StateSpec { id: "qualified".into(), description: "Qualified candidate.".into() },
    ];
    let actions = vec![ActionSpec::terminal("reject"), ActionSpec::terminal("interview")];
    let cost = vec![vec![0.0, c_reject_qualified], vec![c_interview_unqualified, 0.0]];
    let prior = Belief::new(vec![1.0 - p_qualified, p_qualified])?;
    DecisionProblem::new(states, actions, cost, prior, 0.0)
}

/// Posterior proportional to `belief * likelihoods`.
pub fn bayes_update(belief: &Belief, likelihoods: &LikelihoodVector) -> Result<Belief, DecisionError> {
    bayes_update_weights(belief, likelihoods.values())
}

/// Like [`bayes_update`] but accepts any non-negative weights, which need not
/// lie in [0, 1]. Only ratios between entries matter.
pub fn bayes_update_weights(belief: &Belief, weights: &[f64]) -> Result<Belief, DecisionError> {
    if weights.len() != belief.len() {
        return Err(DecisionError::DimensionMismatch { expected: belief.len(), got: weights.len() });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(DecisionError::InvalidLikelihood("weights must be finite and >= 0".into()));
    }
    let joint: Vec<f64> = belief.probs().iter().zip(weights).map(|(b, l)| b * l).collect();
    let z: f64 = joint.iter().sum();
    if z <= 0.0 {
        return Err(DecisionError::ZeroEvidence);
    }
    Belief::from_weights(&joint)
}

pub fn expected_cost(belief: &Belief, problem: &DecisionProblem, action: ActionId) -> Result<f64, DecisionError> {
    if action.0 >= problem.actions.len() {
        return Err(DecisionError::UnknownAction(action.0));
    }
    if belief.len() != problem.n_states() {
        return Err(DecisionError::DimensionMismatch { expected: problem.n_states(), got: belief.len() });
    }
    Ok(dot(belief.probs(), problem.cost_row(action)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Terminal action with the lowest expected cost. Ties go to the lowest index.
pub fn select_action(belief: &Belief, problem: &DecisionProblem) -> (ActionId, f64) {
    assert_eq!(belief.len(), problem.n_states(), "belief does not match problem");
    let mut best: Option<(ActionId, f64)> = None;
    for a in problem.terminal_actions() {
        let c = dot(belief.probs(), problem.cost_row(a));
        match best {
            Some((_, bc)) if c >= bc => {}
            _ => best = Some((a, c)),
        }
    }
    best.expect("problem has a terminal action")
}

/// Probability of the second state at which the two terminal actions have
/// equal expected cost.
pub fn binary_interview_threshold(problem: &DecisionProblem) -> Result<f64, DecisionError> {
    let terminals: Vec<ActionId> = problem.terminal_actions().collect();
    if problem.n_states() != 2 || terminals.len() != 2 {
        return Err(DecisionError::NotBinary);
    }
    let (a1, a2) = (terminals[0], terminals[1]);
    let (s1, s2) = (StateId(0), StateId(1));
    let fp = problem.cost(a2, s1) - problem.cost(a1, s1);
    let fn_ = problem.cost(a1, s2) - problem.cost(a2, s2);
    let denom = fn_ + fp;
    if denom == 0.0 {
        return Err(DecisionError::DegenerateCosts);
    }
    Ok(fp / denom)
}

/// Shannon entropy in bits.
pub fn entropy(belief: &Belief) -> f64 {
    belief
        .probs()
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn b(v: &[f64]) -> Belief {
        Belief::new(v.to_vec()).unwrap()
    }

    fn l(v: &[f64]) -> LikelihoodVector {
        LikelihoodVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn uniform_likelihood_keeps_prior() {
        let prior = b(&[0.65, 0.25, 0.08, 0.02]);
        let post = bayes_update(&prior, &l(&[0.5; 4])).unwrap();
        for (x, y) in post.probs().iter().zip(prior.probs()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn two_state_update() {
        let post = bayes_update(&b(&[0.5, 0.5]), &l(&[0.2, 0.8])).unwrap();
        let want = [0.1 / 0.5, 0.4 / 0.5];
        assert_abs_diff_eq!(post.probs()[0], want[0], epsilon = 1e-15);
        assert_abs_diff_eq!(post.probs()[1], want[1], epsilon = 1e-15);
    }

    #[test]
    fn degenerate_prior_is_absorbing() {
        let post = bayes_update(&b(&[1.0, 0.0]), &l(&[0.3, 0.9])).unwrap();
        assert_eq!(post.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn zero_evidence_is_an_error() {
        let r = bayes_update(&b(&[1.0, 0.0]), &l(&[0.0, 0.9]));
        assert_eq!(r, Err(DecisionError::ZeroEvidence));
        let r = bayes_update(&b(&[0.5, 0.5]), &l(&[0.0, 0.0]));
        assert_eq!(r, Err(DecisionError::ZeroEvidence));
    }

    #[test]
    fn dimension_mismatch() {
        let r = bayes_update(&b(&[0.5, 0.5]), &l(&[0.2, 0.3, 0.4]));
        assert!(matches!(r, Err(DecisionError::DimensionMismatch { .. })));
    }

    #[test]
    fn expected_costs_for_low_probability_candidate() {
        let p = binary_hiring_problem(40_000.0, 2_500.0, 0.5).unwrap();
        let belief = b(&[0.97, 0.03]);
        let interview = p.action_by_name("interview").unwrap();
        let reject = p.action_by_name("reject").unwrap();
        assert_abs_diff_eq!(expected_cost(&belief, &p, interview).unwrap(), 2_425.0, epsilon = 1e-9);
        assert_abs_diff_eq!(expected_cost(&belief, &p, reject).unwrap(), 1_200.0, epsilon = 1e-9);
        assert_eq!(select_action(&belief, &p).0, reject);
        assert_eq!(select_action(&b(&[0.35, 0.65]), &p).0, interview);
    }

    #[test]
    fn zero_cost_matrix() {
        let h = hiring_problem();
        let zero = h.with_scaled_costs(|_, _| 0.0, 0.0).unwrap();
        let belief = b(&[0.1, 0.2, 0.3, 0.4]);
        for a in 0..3 {
            assert_eq!(expected_cost(&belief, &zero, ActionId(a)).unwrap(), 0.0);
        }
        assert_eq!(select_action(&belief, &zero), (ActionId(0), 0.0));
    }

    #[test]
    fn unknown_action() {
        let h = hiring_problem();
        assert_eq!(
            expected_cost(h.prior(), &h, ActionId(7)),
            Err(DecisionError::UnknownAction(7))
        );
    }

    #[test]
    fn select_skips_gather_actions() {
        let h = hiring_problem();
        // The screen row is cheapest here but it is not terminal.
        let belief = b(&[0.0, 1.0, 0.0, 0.0]);
        let (a, c) = select_action(&belief, &h);
        assert_eq!(h.actions()[a.0].id, "interview");
        assert_eq!(c, 2_500.0);
    }

    #[test]
    fn thresholds() {
        let p = binary_hiring_problem(40_000.0, 2_500.0, 0.5).unwrap();
        assert_abs_diff_eq!(binary_interview_threshold(&p).unwrap(), 2_500.0 / 42_500.0, epsilon = 1e-12);
        let sym = binary_hiring_problem(1.0, 1.0, 0.5).unwrap();
        assert_eq!(binary_interview_threshold(&sym).unwrap(), 0.5);
        let fp_heavy = binary_hiring_problem(1.0, 10.0, 0.5).unwrap();
        assert_abs_diff_eq!(binary_interview_threshold(&fp_heavy).unwrap(), 10.0 / 11.0, epsilon = 1e-15);
        let fn_heavy = binary_hiring_problem(10.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(binary_interview_threshold(&fn_heavy).unwrap(), 1.0 / 11.0, epsilon = 1e-15);
    }

    #[test]
    fn threshold_errors() {
        let zero = binary_hiring_problem(0.0, 0.0, 0.5).unwrap();
        assert_eq!(binary_interview_threshold(&zero), Err(DecisionError::DegenerateCosts));
        assert_eq!(binary_interview_threshold(&hiring_problem()), Err(DecisionError::NotBinary));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&b(&[1.0, 0.0, 0.0, 0.0])), 0.0);
        assert_abs_diff_eq!(entropy(&b(&[0.25; 4])), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(entropy(&b(&[0.5, 0.5])), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn problem_validation() {
        let h = hiring_problem();
        let states = h.states().to_vec();
        let prior = h.prior().clone();
        let only_gather = vec![ActionSpec::gather("a")];
        assert!(DecisionProblem::new(states.clone(), only_gather, vec![vec![1.0; 4]], prior.clone(), 1.0).is_err());
        let dup = vec![ActionSpec::terminal("a"), ActionSpec::terminal("a")];
        assert!(DecisionProblem::new(states.clone(), dup, vec![vec![1.0; 4]; 2], prior.clone(), 1.0).is_err());
        let neg = vec![vec![-1.0, 0.0, 0.0, 0.0]];
        assert!(DecisionProblem::new(states, vec![ActionSpec::terminal("a")], neg, prior, 1.0).is_err());
        assert!(Belief::new(vec![0.5, 0.6]).is_err());
        assert!(Belief::new(vec![0.5, 0.5 + 1e-11]).is_err());
        assert!(LikelihoodVector::new(vec![1.2]).is_err());
    }

    #[test]
    fn problem_serde_roundtrip() {
        let h = hiring_problem();
        let s = serde_json::to_string(&h).unwrap();
        let back: DecisionProblem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }

    fn belief_strategy(n: usize) -> impl Strategy<Value = Belief> {
        proptest::collection::vec(0.01f64..1.0, n).prop_map(|w| Belief::from_weights(&w).unwrap())
    }

    proptest! {
        #[test]
        fn posterior_sums_to_one(prior in belief_strategy(4), lik in proptest::collection::vec(0.001f64..1.0, 4)) {
            let post = bayes_update(&prior, &LikelihoodVector::new(lik).unwrap()).unwrap();
            let s: f64 = post.probs().iter().sum();
            prop_assert!((s - 1.0).abs() <= PROB_TOL);
        }

        #[test]
        fn scaling_likelihoods_leaves_posterior(prior in belief_strategy(4),
                                                lik in proptest::collection::vec(0.001f64..1.0, 4),
                                                c in 1e-3f64..1e3) {
            let a = bayes_update_weights(&prior, &lik).unwrap();
            let scaled: Vec<f64> = lik.iter().map(|x| x * c).collect();
            let b = bayes_update_weights(&prior, &scaled).unwrap();
            for (x, y) in a.probs().iter().zip(b.probs()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn sequential_equals_batch(prior in belief_strategy(4),
                                   seq in proptest::collection::vec(proptest::collection::vec(0.01f64..1.0, 4), 1..8)) {
            let mut cur = prior.clone();
            for lik in &seq {
                cur = bayes_update_weights(&cur, lik).unwrap();
            }
            let mut joint = prior.probs().to_vec();
            for lik in &seq {
                for (j, x) in joint.iter_mut().zip(lik) {
                    *j *= x;
                }
            }
            let z: f64 = joint.iter().sum();
            for (x, j) in cur.probs().iter().zip(&joint) {
                prop_assert!((x - j / z).abs() < 1e-9);
            }
        }

        #[test]
        fn entropy_bounded_by_uniform(belief in belief_strategy(4)) {
            let h = entropy(&belief);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&h));
        }

        #[test]
        fn entropy_zero_only_when_degenerate(belief in belief_strategy(3)) {
            // Strictly positive weights never give a degenerate belief.
            prop_assert!(entropy(&belief) > 0.0);
        }

        #[test]
        fn selected_action_is_minimal(belief in belief_strategy(4)) {
            let h = hiring_problem();
            let (a, c) = select_action(&belief, &h);
            prop_assert!(h.actions()[a.0].is_terminal());
            for t in h.terminal_actions() {
                prop_assert!(c <= expected_cost(&belief, &h, t).unwrap());
            }
        }
    }
}
