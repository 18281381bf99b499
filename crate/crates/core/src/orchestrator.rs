//! The per-candidate loop: elicit, aggregate, update, gate, maybe screen,
//! then act.
//!
//! The decision path only ever sees observations and panels. The candidate's
//! true state is read once, after the terminal action is fixed, to price it.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::{Candidate, Demographics};
use crate::decision::{bayes_update, entropy, select_action, ActionId, Belief, DecisionError, DecisionProblem, StateId};
use crate::elicitation::{ElicitError, Observation, Provider};
use crate::ensemble::{build_panel, single_provider_panel, EnsembleError, LikelihoodPanel};
use crate::voi::{gate, voi_approx, GateDecision, InfoSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpisodeError {
    #[error("no providers configured")]
    NoProviders,
    #[error(transparent)]
    Elicit(#[from] ElicitError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

/// How the gather decision is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GatePolicy {
    /// Disagreement above `tau_d` and VOI above cost.
    Framework,
    /// VOI above cost only. Used when disagreement is unavailable or ignored.
    VoiOnly,
    Always,
    Never,
}

/// How resume and screen evidence reach the belief.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceMode {
    /// Resume first, screen afterwards if the gate asks for it.
    #[default]
    Sequential,
    /// Every candidate is screened and both pieces of evidence go into one
    /// elicitation and one update.
    Batch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub tau_d: f64,
    pub policy: GatePolicy,
    #[serde(default)]
    pub evidence: EvidenceMode,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self { tau_d: 0.15, policy: GatePolicy::Framework, evidence: EvidenceMode::Sequential }
    }
}

/// One gate evaluation as recorded in the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoiCheck {
    /// Index into the trace's beliefs of the belief the check was made on.
    pub belief_index: usize,
    pub decision: GateDecision,
    pub policy: GatePolicy,
    /// False when the gate fired but the only source was already used.
    pub source_available: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub candidate_id: u64,
    pub demographics: Demographics,
    pub observations: Vec<Observation>,
    pub panels: Vec<LikelihoodPanel>,
    /// Belief after each observation; the prior is not included.
    pub beliefs: Vec<Belief>,
    pub entropies: Vec<f64>,
    pub prior_entropy: f64,
    pub voi_checks: Vec<VoiCheck>,
    pub screens_taken: u32,
    pub terminal_action: ActionId,
    pub terminal_action_name: String,
    pub expected_cost: f64,
    pub true_state: StateId,
    pub realized_cost: f64,
    pub fallback_count: u32,
    /// The gate asked for more evidence after the screen had been used.
    pub gather_without_source: bool,
}

impl EpisodeTrace {
    pub fn final_belief(&self) -> &Belief {
        self.beliefs.last().expect("trace has at least one belief")
    }
}

/// Elicits from every provider and aggregates. A single provider yields a
/// panel with zero recorded disagreement.
pub fn elicit_panel(
    obs: &Observation,
    problem: &DecisionProblem,
    providers: &[Provider],
) -> Result<(LikelihoodPanel, u32), EpisodeError> {
    if providers.is_empty() {
        return Err(EpisodeError::NoProviders);
    }
    let rows = crate::par::map(providers, |p| p.elicit(obs, problem));
    let mut matrix = Vec::with_capacity(rows.len());
    let mut fallbacks = 0;
    for row in rows {
        let row = row?;
        fallbacks += row.iter().filter(|e| e.fallback_used).count() as u32;
        matrix.push(row.into_iter().map(|e| e.normalized).collect::<Vec<f64>>());
    }
    let panel = if matrix.len() == 1 {
        single_provider_panel(matrix.pop().expect("one row"))?
    } else {
        build_panel(matrix)?
    };
    Ok((panel, fallbacks))
}

/// Outcome of the decision path, before pricing against the true state.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionPath {
    pub observations: Vec<Observation>,
    pub panels: Vec<LikelihoodPanel>,
    pub beliefs: Vec<Belief>,
    pub voi_checks: Vec<VoiCheck>,
    pub screens_taken: u32,
    pub terminal_action: ActionId,
    pub expected_cost: f64,
    pub fallback_count: u32,
    pub gather_without_source: bool,
}

fn evaluate_gate(
    policy: GatePolicy,
    panel: &LikelihoodPanel,
    belief: &Belief,
    problem: &DecisionProblem,
    source: &InfoSource,
    tau_d: f64,
) -> GateDecision {
    let voi = voi_approx(belief, problem, source);
    let mut d = gate(panel.max_disagreement, voi, source.cost, tau_d);
    d.gather = match policy {
        GatePolicy::Framework => d.gather,
        GatePolicy::VoiOnly => d.voi_gate,
        GatePolicy::Always => true,
        GatePolicy::Never => false,
    };
    d
}

/// Runs the sequential loop from a resume panel. `screen` is called at most
/// once, only when the gate decides to gather, and returns the screen
/// observation with its panel and fallback count.
pub fn decide<F>(
    problem: &DecisionProblem,
    source: &InfoSource,
    config: &EpisodeConfig,
    resume: (Observation, LikelihoodPanel, u32),
    screen: F,
) -> Result<DecisionPath, EpisodeError>
where
    F: FnOnce() -> Result<(Observation, LikelihoodPanel, u32), EpisodeError>,
{
    let (obs, panel, fallbacks) = resume;
    let mut belief = bayes_update(problem.prior(), &panel.aggregated)?;
    let mut path = DecisionPath {
        observations: vec![obs],
        panels: vec![panel],
        beliefs: vec![belief.clone()],
        voi_checks: Vec::new(),
        screens_taken: 0,
        terminal_action: ActionId(0),
        expected_cost: 0.0,
        fallback_count: fallbacks,
        gather_without_source: false,
    };
    let mut screen = Some(screen);
    loop {
        let panel = path.panels.last().expect("panel");
        let decision = evaluate_gate(config.policy, panel, &belief, problem, source, config.tau_d);
        // Forced policies have nothing further to say once the screen is used.
        if path.screens_taken > 0 && matches!(config.policy, GatePolicy::Always | GatePolicy::Never) {
            break;
        }
        let gather = decision.gather;
        let available = screen.is_some();
        path.voi_checks.push(VoiCheck {
            belief_index: path.beliefs.len() - 1,
            decision,
            policy: config.policy,
            source_available: available || !gather,
        });
        if !gather {
            break;
        }
        let Some(take) = screen.take() else {
            path.gather_without_source = true;
            break;
        };
        let (obs, panel, fallbacks) = take()?;
        belief = bayes_update(&belief, &panel.aggregated)?;
        path.screens_taken += 1;
        path.fallback_count += fallbacks;
        path.observations.push(obs);
        path.panels.push(panel);
        path.beliefs.push(belief.clone());
    }
    let (a, c) = select_action(&belief, problem);
    path.terminal_action = a;
    path.expected_cost = c;
    Ok(path)
}

/// Single-update path used by the batch-evidence ablation.
pub fn decide_batch(
    problem: &DecisionProblem,
    combined: (Observation, LikelihoodPanel, u32),
) -> Result<DecisionPath, EpisodeError> {
    let (obs, panel, fallbacks) = combined;
    let belief = bayes_update(problem.prior(), &panel.aggregated)?;
    let (a, c) = select_action(&belief, problem);
    Ok(DecisionPath {
        observations: vec![obs],
        panels: vec![panel],
        beliefs: vec![belief],
        voi_checks: Vec::new(),
        screens_taken: 1,
        terminal_action: a,
        expected_cost: c,
        fallback_count: fallbacks,
        gather_without_source: false,
    })
}

/// Prices a decision path against the candidate's true state.
pub fn finish_trace(path: DecisionPath, candidate: &Candidate, problem: &DecisionProblem) -> EpisodeTrace {
    let realized_cost =
        problem.cost(path.terminal_action, candidate.true_state) + path.screens_taken as f64 * problem.info_cost();
    EpisodeTrace {
        candidate_id: candidate.id,
        demographics: candidate.demographics,
        entropies: path.beliefs.iter().map(entropy).collect(),
        prior_entropy: entropy(problem.prior()),
        observations: path.observations,
        panels: path.panels,
        beliefs: path.beliefs,
        voi_checks: path.voi_checks,
        screens_taken: path.screens_taken,
        terminal_action_name: problem.actions()[path.terminal_action.0].id.clone(),
        terminal_action: path.terminal_action,
        expected_cost: path.expected_cost,
        true_state: candidate.true_state,
        realized_cost,
        fallback_count: path.fallback_count,
        gather_without_source: path.gather_without_source,
    }
}

pub fn run_episode(
    candidate: &Candidate,
    problem: &DecisionProblem,
    providers: &[Provider],
    source: &InfoSource,
    config: &EpisodeConfig,
) -> Result<EpisodeTrace, EpisodeError> {
    let path = match config.evidence {
        EvidenceMode::Sequential => {
            let resume = Observation::resume(candidate);
            let (panel, fb) = elicit_panel(&resume, problem, providers)?;
            decide(problem, source, config, (resume, panel, fb), || {
                let obs = Observation::phone_screen(candidate);
                let (panel, fb) = elicit_panel(&obs, problem, providers)?;
                Ok((obs, panel, fb))
            })?
        }
        EvidenceMode::Batch => {
            let obs = Observation::combined(candidate);
            let (panel, fb) = elicit_panel(&obs, problem, providers)?;
            decide_batch(problem, (obs, panel, fb))?
        }
    };
    Ok(finish_trace(path, candidate, problem))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeFailure {
    pub candidate_id: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PopulationRun {
    /// Successful traces in candidate order.
    pub traces: Vec<EpisodeTrace>,
    pub failures: Vec<EpisodeFailure>,
}

/// Runs every candidate on up to `workers` threads (0 = default pool).
/// Results do not depend on `workers`.
pub fn run_population(
    candidates: &[Candidate],
    problem: &DecisionProblem,
    providers: &[Provider],
    source: &InfoSource,
    config: &EpisodeConfig,
    workers: usize,
) -> PopulationRun {
    let results = crate::par::with_workers(workers, || {
        crate::par::map(candidates, |c| run_episode(c, problem, providers, source, config))
    });
    let mut run = PopulationRun::default();
    for (c, r) in candidates.iter().zip(results) {
        match r {
            Ok(t) => run.traces.push(t),
            Err(e) => run.failures.push(EpisodeFailure { candidate_id: c.id, error: e.to_string() }),
        }
    }
    run
}

/// Writes one JSON record per trace.
pub fn write_traces(path: &Path, traces: &[EpisodeTrace]) -> std::io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for t in traces {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_traces(path: &Path) -> std::io::Result<Vec<EpisodeTrace>> {
    let reader = BufReader::new(fs::File::open(path)?);
    reader
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}
