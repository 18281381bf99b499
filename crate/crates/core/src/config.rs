//! Experiment configuration loaded from TOML.
//!
//! Every section is optional and falls back to the reference hiring setup:
//! the four-state problem, five simulated providers, `tau_d = 0.15`,
//! `rho = 0.7` and 1,000 candidates. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{hiring_problem, DecisionProblem};
use crate::elicitation::simulated::reference_roster;
use crate::elicitation::{ElicitError, Provider, ProviderConfig};
use crate::evaluation::sweep::SweepParameter;
use crate::evaluation::{ExperimentSetup, Method, BOOTSTRAP_ITERATIONS, PERMUTATION_ITERATIONS};
use crate::orchestrator::{EpisodeConfig, GatePolicy};
use crate::voi::{InfoSource, VoiError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Provider(#[from] ElicitError),
    #[error(transparent)]
    Voi(#[from] VoiError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateSettings {
    pub tau_d: f64,
    pub rho: f64,
    pub policy: GatePolicy,
}

impl Default for GateSettings {
    fn default() -> Self {
        Self { tau_d: 0.15, rho: 0.7, policy: GatePolicy::Framework }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PopulationSettings {
    pub n: usize,
    pub seed: u64,
}

impl Default for PopulationSettings {
    fn default() -> Self {
        Self { n: 1000, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    pub cost_amplitude: f64,
    pub cost_draws: usize,
    pub tau_d: Vec<f64>,
    pub rho: Vec<f64>,
    pub prior_concentration: f64,
    pub prior_draws: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            cost_amplitude: 0.2,
            cost_draws: 20,
            tau_d: vec![0.10, 0.15, 0.20],
            rho: vec![0.5, 0.7, 0.9],
            prior_concentration: 100.0,
            prior_draws: 20,
        }
    }
}

impl SweepSettings {
    pub fn parameter(&self, name: &str) -> Option<SweepParameter> {
        Some(match name {
            "cost_scale" => SweepParameter::CostScale { amplitude: self.cost_amplitude, draws: self.cost_draws },
            "tau_d" => SweepParameter::TauD { grid: self.tau_d.clone() },
            "rho" => SweepParameter::Rho { grid: self.rho.clone() },
            "prior" => SweepParameter::Prior { concentration: self.prior_concentration, draws: self.prior_draws },
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatisticsSettings {
    pub bootstrap_iterations: usize,
    pub permutation_iterations: usize,
    pub alpha: f64,
}

impl Default for StatisticsSettings {
    fn default() -> Self {
        Self {
            bootstrap_iterations: BOOTSTRAP_ITERATIONS,
            permutation_iterations: PERMUTATION_ITERATIONS,
            alpha: crate::evaluation::ALPHA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub problem: DecisionProblem,
    /// Empty means the five simulated reference providers.
    pub providers: Vec<ProviderConfig>,
    pub gate: GateSettings,
    pub population: PopulationSettings,
    pub methods: Vec<Method>,
    pub sweep: SweepSettings,
    pub statistics: StatisticsSettings,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: hiring_problem(),
            providers: Vec::new(),
            gate: GateSettings::default(),
            population: PopulationSettings::default(),
            methods: Method::ALL.to_vec(),
            sweep: SweepSettings::default(),
            statistics: StatisticsSettings::default(),
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)
            .map_err(|e| ConfigError::Parse { path: PathBuf::from("<inline>"), source: Box::new(e) })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&text).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse { path: path.into(), source },
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.population.n == 0 {
            return bad("population.n must be positive");
        }
        if !(0.0..).contains(&self.gate.tau_d) {
            return bad("gate.tau_d must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.gate.rho) {
            return bad("gate.rho must lie in [0, 1]");
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty");
        }
        if !(self.statistics.alpha > 0.0 && self.statistics.alpha < 1.0) {
            return bad("statistics.alpha must lie in (0, 1)");
        }
        let s = &self.sweep;
        if s.tau_d.is_empty() || s.rho.is_empty() || s.cost_draws == 0 || s.prior_draws == 0 {
            return bad("sweep grids must be non-empty");
        }
        if s.rho.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return bad("sweep.rho values must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&s.cost_amplitude) {
            return bad("sweep.cost_amplitude must lie in [0, 1)");
        }
        if s.prior_concentration.is_nan() || s.prior_concentration <= 0.0 {
            return bad("sweep.prior_concentration must be positive");
        }
        for p in &self.providers {
            p.validate()?;
        }
        if self.problem.terminal_actions().count() == self.problem.actions().len() {
            return bad("problem needs a gather action for the screen");
        }
        Ok(())
    }

    pub fn provider_configs(&self) -> Vec<ProviderConfig> {
        if self.providers.is_empty() {
            reference_roster(self.population.seed)
        } else {
            self.providers.clone()
        }
    }

    pub fn episode(&self) -> EpisodeConfig {
        EpisodeConfig { tau_d: self.gate.tau_d, policy: self.gate.policy, ..EpisodeConfig::default() }
    }

    /// Builds providers and the information source. `workers` of 0 uses the
    /// default pool.
    pub fn setup(&self, workers: usize) -> Result<ExperimentSetup, ConfigError> {
        let providers = self.provider_configs().into_iter().map(Provider::from_config).collect::<Result<_, _>>()?;
        Ok(ExperimentSetup {
            source: InfoSource::phone_screen(&self.problem, self.gate.rho)?,
            problem: self.problem.clone(),
            providers,
            episode: self.episode(),
            seed: self.population.seed,
            workers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference_setup() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.provider_configs().len(), 5);
        assert_eq!(c.episode().tau_d, 0.15);
    }

    #[test]
    fn overrides_and_rejections() {
        let c = ExperimentConfig::from_toml("methods = [\"framework\", \"never_screen\"]\n[population]\nn = 50\nseed = 7\n")
            .unwrap();
        assert_eq!(c.population, PopulationSettings { n: 50, seed: 7 });
        assert_eq!(c.methods, vec![Method::Framework, Method::NeverScreen]);
        assert!(matches!(ExperimentConfig::from_toml("colour = 3"), Err(ConfigError::Parse { .. })));
        assert!(matches!(ExperimentConfig::from_toml("[population]\nn = 0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(ExperimentConfig::from_toml("[gate]\nrho = 1.5"), Err(ConfigError::Invalid(_))));
        assert!(matches!(ExperimentConfig::from_toml("[gate]\nfoo = 1"), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn serialized_default_reloads() {
        let text = toml::to_string(&ExperimentConfig::default()).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), ExperimentConfig::default());
    }
}
