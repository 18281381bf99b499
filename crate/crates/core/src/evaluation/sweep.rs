//! Sensitivity sweeps that replay decisions on cached likelihoods.
//!
//! Resume and screen panels are elicited once per candidate. Each setting
//! then reruns only the update, gate and action choice, so differences come
//! from the setting alone.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::Candidate;
use crate::decision::{ActionId, Belief, DecisionError, DecisionProblem, StateId};
use crate::elicitation::{Observation, Provider};
use crate::ensemble::LikelihoodPanel;
use crate::orchestrator::{decide, elicit_panel, DecisionPath, EpisodeConfig, EpisodeError};
use crate::seed;
use crate::voi::{InfoSource, VoiError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("unknown sweep parameter {0:?}")]
    UnknownParameter(String),
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Voi(#[from] VoiError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parameter", rename_all = "snake_case")]
pub enum SweepParameter {
    /// Every cost entry, and the screen price, scaled by its own draw from
    /// U(1 - amplitude, 1 + amplitude).
    CostScale { amplitude: f64, draws: usize },
    TauD { grid: Vec<f64> },
    Rho { grid: Vec<f64> },
    /// Priors drawn from a Dirichlet centred on the nominal prior with the
    /// given total concentration.
    Prior { concentration: f64, draws: usize },
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            Self::CostScale { .. } => "cost_scale",
            Self::TauD { .. } => "tau_d",
            Self::Rho { .. } => "rho",
            Self::Prior { .. } => "prior",
        }
    }

    /// Defaults by name: costs ±20% over 20 draws, tau_d {0.10, 0.15, 0.20},
    /// rho {0.5, 0.7, 0.9}, 20 prior draws at concentration 100.
    pub fn by_name(name: &str) -> Result<Self, SweepError> {
        Ok(match name {
            "cost_scale" => Self::CostScale { amplitude: 0.2, draws: 20 },
            "tau_d" => Self::TauD { grid: vec![0.10, 0.15, 0.20] },
            "rho" => Self::Rho { grid: vec![0.5, 0.7, 0.9] },
            "prior" => Self::Prior { concentration: 100.0, draws: 20 },
            other => return Err(SweepError::UnknownParameter(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub setting: String,
    /// Grid value for one-dimensional sweeps.
    pub value: Option<f64>,
    /// Total cost under the nominal cost matrix.
    pub total_cost: f64,
    /// Total cost under the setting's own cost matrix.
    pub setting_cost: f64,
    pub screens: usize,
    /// Fraction of candidates whose terminal action differs from the nominal run.
    pub flip_fraction: f64,
}

/// Panels for one candidate, elicited once.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedEvidence {
    pub candidate_id: u64,
    pub true_state: StateId,
    pub resume: (Observation, LikelihoodPanel, u32),
    pub screen: (Observation, LikelihoodPanel, u32),
}

pub fn cache_evidence(
    candidates: &[Candidate],
    problem: &DecisionProblem,
    providers: &[Provider],
    workers: usize,
) -> Result<Vec<CachedEvidence>, EpisodeError> {
    crate::par::with_workers(workers, || {
        crate::par::map(candidates, |c| {
            let r = Observation::resume(c);
            let (rp, rf) = elicit_panel(&r, problem, providers)?;
            let s = Observation::phone_screen(c);
            let (sp, sf) = elicit_panel(&s, problem, providers)?;
            Ok(CachedEvidence { candidate_id: c.id, true_state: c.true_state, resume: (r, rp, rf), screen: (s, sp, sf) })
        })
    })
    .into_iter()
    .collect()
}

/// Reruns the decision path for every cached candidate.
pub fn replay(
    cache: &[CachedEvidence],
    problem: &DecisionProblem,
    source: &InfoSource,
    config: &EpisodeConfig,
) -> Result<Vec<DecisionPath>, EpisodeError> {
    crate::par::map(cache, |e| decide(problem, source, config, e.resume.clone(), || Ok(e.screen.clone())))
        .into_iter()
        .collect()
}

fn cost_of(paths: &[DecisionPath], cache: &[CachedEvidence], problem: &DecisionProblem) -> f64 {
    paths
        .iter()
        .zip(cache)
        .map(|(p, e)| problem.cost(p.terminal_action, e.true_state) + p.screens_taken as f64 * problem.info_cost())
        .sum()
}

fn flips(paths: &[DecisionPath], nominal: &[ActionId]) -> f64 {
    if nominal.is_empty() {
        return 0.0;
    }
    paths.iter().zip(nominal).filter(|(p, a)| p.terminal_action != **a).count() as f64 / nominal.len() as f64
}

/// Dirichlet draw via normalized Gamma variates.
fn dirichlet<R: Rng + ?Sized>(alpha: &[f64], rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = alpha
        .iter()
        .map(|&a| Gamma::new(a.max(1e-3), 1.0).expect("positive shape").sample(rng).max(1e-300))
        .collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|x| x / s).collect()
}

struct Setting {
    label: String,
    value: Option<f64>,
    problem: DecisionProblem,
    source: InfoSource,
    config: EpisodeConfig,
}

/// Settings for a sweep. The nominal setting is not included.
fn settings(
    parameter: &SweepParameter,
    problem: &DecisionProblem,
    source: &InfoSource,
    config: &EpisodeConfig,
    seed: u64,
) -> Result<Vec<Setting>, SweepError> {
    let base = |label: String, value| Setting {
        label,
        value,
        problem: problem.clone(),
        source: source.clone(),
        config: *config,
    };
    let out = match parameter {
        SweepParameter::CostScale { amplitude, draws } => (0..*draws)
            .map(|d| {
                let mut rng = seed::rng(&[seed, seed::label("cost_scale"), d as u64]);
                let info = rng.random_range(1.0 - amplitude..=1.0 + amplitude);
                let scaled = problem.with_scaled_costs(|_, _| rng.random_range(1.0 - amplitude..=1.0 + amplitude), info)?;
                let src = InfoSource { cost: scaled.info_cost(), ..source.clone() };
                Ok(Setting { problem: scaled, source: src, ..base(format!("draw {d}"), None) })
            })
            .collect::<Result<Vec<_>, SweepError>>()?,
        SweepParameter::TauD { grid } => grid
            .iter()
            .map(|&t| Setting { config: EpisodeConfig { tau_d: t, ..*config }, ..base(format!("tau_d={t}"), Some(t)) })
            .collect(),
        SweepParameter::Rho { grid } => grid
            .iter()
            .map(|&r| Ok(Setting { source: InfoSource::new(source.name.clone(), source.cost, r)?, ..base(format!("rho={r}"), Some(r)) }))
            .collect::<Result<Vec<_>, SweepError>>()?,
        SweepParameter::Prior { concentration, draws } => {
            let alpha: Vec<f64> = problem.prior().probs().iter().map(|p| p * concentration).collect();
            (0..*draws)
                .map(|d| {
                    let mut rng = seed::rng(&[seed, seed::label("prior"), d as u64]);
                    let prior = Belief::from_weights(&dirichlet(&alpha, &mut rng))?;
                    Ok(Setting { problem: problem.with_prior(prior)?, ..base(format!("draw {d}"), None) })
                })
                .collect::<Result<Vec<_>, SweepError>>()?
        }
    };
    if out.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    Ok(out)
}

/// One row per setting, after a leading `nominal` row.
pub fn sensitivity_sweep(
    parameter: &SweepParameter,
    cache: &[CachedEvidence],
    problem: &DecisionProblem,
    source: &InfoSource,
    config: &EpisodeConfig,
    seed: u64,
) -> Result<Vec<SweepRow>, SweepError> {
    let settings = settings(parameter, problem, source, config, seed)?;
    let nominal = replay(cache, problem, source, config)?;
    let nominal_actions: Vec<ActionId> = nominal.iter().map(|p| p.terminal_action).collect();
    let row = |label: String, value, paths: &[DecisionPath], own: &DecisionProblem| SweepRow {
        parameter: parameter.name().to_string(),
        setting: label,
        value,
        total_cost: cost_of(paths, cache, problem),
        setting_cost: cost_of(paths, cache, own),
        screens: paths.iter().map(|p| p.screens_taken as usize).sum(),
        flip_fraction: flips(paths, &nominal_actions),
    };
    let mut rows = vec![row("nominal".into(), None, &nominal, problem)];
    for s in settings {
        let paths = replay(cache, &s.problem, &s.source, &s.config)?;
        rows.push(row(s.label, s.value, &paths, &s.problem));
    }
    Ok(rows)
}
