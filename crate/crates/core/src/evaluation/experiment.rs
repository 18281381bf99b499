//! Runs the framework, the discriminative baselines and the ablations on a
//! population.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::{sample_population, Candidate, DatagenError};
use crate::decision::{Belief, DecisionError, DecisionProblem};
use crate::elicitation::{ElicitError, Provider};
use crate::orchestrator::{run_population, EpisodeConfig, EpisodeFailure, EpisodeTrace, EvidenceMode, GatePolicy};
use crate::seed;
use crate::voi::InfoSource;

use super::baselines::{
    calibrate_threshold, calibration_grid, decide_all, score_candidates, BaselineRule, BinaryActions,
    AVERAGE_THRESHOLD, FIXED_THRESHOLD, VOTES_NEEDED, VOTE_THRESHOLD,
};
use super::metrics::DecisionRecord;

/// Size of the validation population for the calibrated threshold.
pub const VALIDATION_SIZE: usize = 200;
/// Validation candidate ids start here so their provider noise streams do not
/// coincide with the evaluation population's.
pub const VALIDATION_ID_BASE: u64 = 1 << 40;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("problem lacks a {0:?} action")]
    MissingAction(&'static str),
    #[error("method needs at least one provider")]
    NoProviders,
    #[error(transparent)]
    Elicit(#[from] ElicitError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Framework,
    FixedThreshold,
    CalibratedThreshold,
    EnsembleVote,
    EnsembleAverage,
    SingleProvider,
    BatchInference,
    AlwaysScreen,
    NeverScreen,
    NoDisagreement,
    UniformPrior,
}

impl Method {
    pub const ALL: [Method; 11] = [
        Self::Framework,
        Self::FixedThreshold,
        Self::CalibratedThreshold,
        Self::EnsembleVote,
        Self::EnsembleAverage,
        Self::SingleProvider,
        Self::BatchInference,
        Self::AlwaysScreen,
        Self::NeverScreen,
        Self::NoDisagreement,
        Self::UniformPrior,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Self::Framework => "framework",
            Self::FixedThreshold => "fixed_threshold",
            Self::CalibratedThreshold => "calibrated_threshold",
            Self::EnsembleVote => "ensemble_vote",
            Self::EnsembleAverage => "ensemble_average",
            Self::SingleProvider => "single_provider",
            Self::BatchInference => "batch_inference",
            Self::AlwaysScreen => "always_screen",
            Self::NeverScreen => "never_screen",
            Self::NoDisagreement => "no_disagreement",
            Self::UniformPrior => "uniform_prior",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, Self::FixedThreshold | Self::CalibratedThreshold | Self::EnsembleVote | Self::EnsembleAverage)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Method {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|m| m.key() == s).ok_or_else(|| ExperimentError::UnknownMethod(s.to_string()))
    }
}

/// Everything a method run needs besides the candidates.
#[derive(Debug, Clone)]
pub struct ExperimentSetup {
    pub problem: DecisionProblem,
    pub providers: Vec<Provider>,
    pub source: InfoSource,
    pub episode: EpisodeConfig,
    /// Seed of the evaluation population; the validation split derives from it.
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MethodRun {
    pub records: Vec<DecisionRecord>,
    /// Full traces for the pipeline variants; empty for baselines.
    pub traces: Vec<EpisodeTrace>,
    pub failures: Vec<EpisodeFailure>,
    /// Threshold picked on the validation split, when calibrated.
    pub calibrated_threshold: Option<f64>,
}

/// Validation candidates for the calibrated baseline, drawn from their own seed.
pub fn validation_population(problem: &DecisionProblem, seed: u64) -> Result<Vec<Candidate>, DatagenError> {
    let mut v = sample_population(VALIDATION_SIZE, problem, seed::derive(&[seed, seed::label("validation")]))?;
    for c in &mut v {
        c.id += VALIDATION_ID_BASE;
    }
    Ok(v)
}

fn pipeline(
    candidates: &[Candidate],
    problem: &DecisionProblem,
    providers: &[Provider],
    setup: &ExperimentSetup,
    episode: EpisodeConfig,
) -> MethodRun {
    let run = run_population(candidates, problem, providers, &setup.source, &episode, setup.workers);
    MethodRun {
        records: run.traces.iter().map(DecisionRecord::from).collect(),
        traces: run.traces,
        failures: run.failures,
        calibrated_threshold: None,
    }
}

pub fn run_method(method: Method, candidates: &[Candidate], setup: &ExperimentSetup) -> Result<MethodRun, ExperimentError> {
    if setup.providers.is_empty() {
        return Err(ExperimentError::NoProviders);
    }
    let p = &setup.problem;
    let all = setup.providers.as_slice();
    let first = &setup.providers[..1];
    let with = |policy, evidence| EpisodeConfig { policy, evidence, ..setup.episode };
    let seq = EvidenceMode::Sequential;
    if method.is_baseline() {
        return run_baseline(method, candidates, setup);
    }
    Ok(match method {
        Method::Framework => pipeline(candidates, p, all, setup, setup.episode),
        // One provider has no disagreement to measure, so only VOI gates.
        Method::SingleProvider => pipeline(candidates, p, first, setup, with(GatePolicy::VoiOnly, seq)),
        Method::BatchInference => pipeline(candidates, p, all, setup, with(setup.episode.policy, EvidenceMode::Batch)),
        Method::AlwaysScreen => pipeline(candidates, p, all, setup, with(GatePolicy::Always, seq)),
        Method::NeverScreen => pipeline(candidates, p, all, setup, with(GatePolicy::Never, seq)),
        Method::NoDisagreement => pipeline(candidates, p, all, setup, with(GatePolicy::VoiOnly, seq)),
        Method::UniformPrior => {
            let uniform = p.with_prior(Belief::uniform(p.n_states()))?;
            pipeline(candidates, &uniform, all, setup, setup.episode)
        }
        _ => unreachable!("baselines handled above"),
    })
}

fn run_baseline(method: Method, candidates: &[Candidate], setup: &ExperimentSetup) -> Result<MethodRun, ExperimentError> {
    let p = &setup.problem;
    let actions = BinaryActions::of(p).ok_or(ExperimentError::MissingAction("reject/interview"))?;
    let single = method == Method::FixedThreshold || method == Method::CalibratedThreshold;
    let providers = if single { &setup.providers[..1] } else { setup.providers.as_slice() };
    let scored = crate::par::with_workers(setup.workers, || score_candidates(candidates, providers))?;
    let mut calibrated = None;
    let rule = match method {
        Method::FixedThreshold => BaselineRule::Threshold { threshold: FIXED_THRESHOLD },
        Method::CalibratedThreshold => {
            let validation = validation_population(p, setup.seed)?;
            let vscored = crate::par::with_workers(setup.workers, || score_candidates(&validation, providers))?;
            let t = calibrate_threshold(&calibration_grid(), &validation, &vscored, p, actions);
            calibrated = Some(t);
            BaselineRule::Threshold { threshold: t }
        }
        Method::EnsembleVote => BaselineRule::Vote { threshold: VOTE_THRESHOLD, needed: VOTES_NEEDED },
        Method::EnsembleAverage => BaselineRule::Average { threshold: AVERAGE_THRESHOLD },
        _ => unreachable!("pipeline methods handled by run_method"),
    };
    Ok(MethodRun {
        records: decide_all(&rule, candidates, &scored, actions),
        traces: Vec::new(),
        failures: Vec::new(),
        calibrated_threshold: calibrated,
    })
}
