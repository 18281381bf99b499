//! Bayesian orchestration of several generative scorers for cost-aware
//! sequential decisions.
//!
//! Each scorer is asked how typical a piece of evidence is under every
//! hypothesized state. The answers are treated as likelihoods, combined with
//! a per-state median, folded into a prior with Bayes' rule and turned into an
//! action by minimizing expected cost. Extra evidence is bought only when the
//! scorers disagree and its value exceeds its price.

pub mod config;
pub mod datagen;
pub mod decision;
pub mod elicitation;
pub mod evaluation;
pub mod ensemble;
pub mod orchestrator;
pub mod par;
pub mod seed;
pub mod voi;

pub use decision::{
    bayes_update, binary_interview_threshold, entropy, expected_cost, hiring_problem, select_action, ActionId,
    Belief, DecisionError, DecisionProblem, LikelihoodVector, StateId,
};
pub use ensemble::{aggregate_median, build_panel, disagreement_cv, LikelihoodPanel};
pub use orchestrator::{run_episode, run_population, EpisodeConfig, EpisodeTrace, GatePolicy};
pub use voi::{should_gather, voi_approx, voi_exact, InfoSource};
