//! Likelihood elicitation: turning evidence and a hypothesized state into a
//! raw 0-10 typicality score per provider.

mod parse;
mod prompt;
#[cfg(feature = "remote")]
mod remote;
pub mod simulated;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::{Candidate, Demographics, ResumeFeatures};
use crate::decision::{DecisionProblem, StateId};
use crate::seed;

pub use parse::parse_score;
pub use prompt::{build_contrastive_prompt, build_quality_prompt, with_retry_suffix};
#[cfg(feature = "remote")]
pub use remote::RemoteBackend;

/// Score used when every attempt for a (provider, state) pair fails.
pub const FALLBACK_SCORE: f64 = 5.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElicitError {
    #[error("no numeric score in response {0:?}")]
    Unparseable(String),
    #[error("provider {provider} unavailable: {reason}")]
    ProviderUnavailable { provider: String, reason: String },
    #[error("simulated provider {0} needs structured evidence features")]
    MissingFeatures(String),
    #[error("invalid provider config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    Resume,
    PhoneScreen,
    /// Resume and screen notes presented together in one prompt.
    Combined,
}

impl EvidenceKind {
    fn code(self) -> u64 {
        match self {
            Self::Resume => 1,
            Self::PhoneScreen => 2,
            Self::Combined => 4,
        }
    }
}

/// Structured form of the evidence, read by simulated providers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceFeatures {
    Resume { features: ResumeFeatures, demographics: Demographics },
    PhoneScreen { performance: f64, demographics: Demographics },
    Combined { features: ResumeFeatures, performance: f64, demographics: Demographics },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub kind: EvidenceKind,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<EvidenceFeatures>,
    pub candidate_id: u64,
}

impl Observation {
    pub fn resume(c: &Candidate) -> Self {
        Self {
            kind: EvidenceKind::Resume,
            text: c.resume_text.clone(),
            features: Some(EvidenceFeatures::Resume { features: c.features.clone(), demographics: c.demographics }),
            candidate_id: c.id,
        }
    }

    /// Screen evidence rendered from the candidate's latent performance.
    pub fn phone_screen(c: &Candidate) -> Self {
        Self {
            kind: EvidenceKind::PhoneScreen,
            text: crate::datagen::render_screen_notes(c.screen_performance),
            features: Some(EvidenceFeatures::PhoneScreen {
                performance: c.screen_performance,
                demographics: c.demographics,
            }),
            candidate_id: c.id,
        }
    }

    /// Resume and screen notes as a single piece of evidence.
    pub fn combined(c: &Candidate) -> Self {
        Self {
            kind: EvidenceKind::Combined,
            text: format!(
                "{}\n\nPHONE SCREEN NOTES\n{}",
                c.resume_text.trim_end(),
                crate::datagen::render_screen_notes(c.screen_performance)
            ),
            features: Some(EvidenceFeatures::Combined {
                features: c.features.clone(),
                performance: c.screen_performance,
                demographics: c.demographics,
            }),
            candidate_id: c.id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProviderMode {
    Remote,
    #[default]
    Simulated,
}

/// Wire format of the remote endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ApiStyle {
    /// `{"messages": [...]}` in, `choices[0].message.content` out, bearer auth.
    #[default]
    ChatCompletions,
    /// `{"messages": [...]}` in, `content[0].text` out, `x-api-key` auth.
    Messages,
}

/// Additive score offsets and feature emphasis for a simulated provider.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasProfile {
    /// Offsets keyed by group, e.g. `gender:female` or `ethnicity:black`.
    #[serde(default)]
    pub demographic: BTreeMap<String, f64>,
    /// Offsets keyed by resume tag, e.g. `tier:elite`.
    #[serde(default)]
    pub feature: BTreeMap<String, f64>,
    /// Relative weight of tier, degree, GPA, years, projects and tech stack.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emphasis: Option<Vec<f64>>,
}

impl BiasProfile {
    pub fn offset(&self, demo: &Demographics, features: Option<&ResumeFeatures>) -> f64 {
        let d: f64 = demo.group_keys().iter().filter_map(|k| self.demographic.get(k)).sum();
        let f: f64 = features
            .map(|f| f.tags().iter().filter_map(|k| self.feature.get(k)).sum())
            .unwrap_or(0.0);
        d + f
    }

    pub fn emphasis_weights(&self) -> [f64; simulated::N_FEATURES] {
        let mut w = [1.0; simulated::N_FEATURES];
        if let Some(e) = &self.emphasis {
            w.copy_from_slice(e);
        }
        w
    }

    fn validate(&self) -> Result<(), String> {
        if let Some(e) = &self.emphasis {
            if e.len() != simulated::N_FEATURES {
                return Err(format!("emphasis needs {} weights, got {}", simulated::N_FEATURES, e.len()));
            }
            if e.iter().any(|w| !w.is_finite() || *w < 0.0) || e.iter().sum::<f64>() <= 0.0 {
                return Err("emphasis weights must be >= 0 with a positive sum".into());
            }
        }
        if self.demographic.values().chain(self.feature.values()).any(|v| !v.is_finite()) {
            return Err("bias offsets must be finite".into());
        }
        Ok(())
    }
}

fn default_temperature() -> f64 {
    0.7
}
fn default_max_tokens() -> u32 {
    10
}
fn default_retries() -> u32 {
    3
}
fn default_timeout() -> f64 {
    30.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub name: String,
    #[serde(default)]
    pub mode: ProviderMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credential_env: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default)]
    pub api_style: ApiStyle,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    /// Retries after the first attempt.
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default)]
    pub bias_profile: BiasProfile,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ProviderConfig {
    /// A noise-free, unbiased simulated provider.
    pub fn simulated(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            mode: ProviderMode::Simulated,
            endpoint: None,
            credential_env: None,
            model: None,
            api_style: ApiStyle::default(),
            temperature: default_temperature(),
            max_tokens: default_max_tokens(),
            max_retries: default_retries(),
            timeout_secs: default_timeout(),
            bias_profile: BiasProfile::default(),
            noise_sd: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ElicitError> {
        let bad = |m: String| Err(ElicitError::InvalidConfig(format!("{}: {m}", self.name)));
        if self.name.is_empty() {
            return bad("empty name".into());
        }
        if !(0.0..).contains(&self.temperature) {
            return bad(format!("temperature {} < 0", self.temperature));
        }
        if !(0.0..).contains(&self.noise_sd) {
            return bad(format!("noise_sd {} < 0", self.noise_sd));
        }
        if self.timeout_secs.is_nan() || self.timeout_secs <= 0.0 {
            return bad("timeout must be positive".into());
        }
        if self.mode == ProviderMode::Remote && (self.endpoint.is_none() || self.credential_env.is_none()) {
            return bad("remote providers need endpoint and credential_env".into());
        }
        self.bias_profile.validate().or_else(bad)
    }
}

/// Transport failures. Misconfiguration aborts; failures are retried.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("misconfigured: {0}")]
    Misconfigured(String),
    #[error("request failed: {0}")]
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct CompletionRequest<'a> {
    pub prompt: &'a str,
    pub temperature: f64,
    pub max_tokens: u32,
    pub attempt: u32,
    pub candidate_id: u64,
}

/// Anything that answers a prompt with text.
pub trait TextBackend: Send + Sync {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, TransportError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEstimate {
    pub provider: String,
    pub state: StateId,
    pub score: f64,
    pub normalized: f64,
    pub fallback_used: bool,
}

impl RawEstimate {
    fn new(provider: &str, state: StateId, score: f64, fallback_used: bool) -> Self {
        Self { provider: provider.to_string(), state, score, normalized: score / 10.0, fallback_used }
    }
}

/// A configured provider with its transport.
#[derive(Clone)]
pub struct Provider {
    config: ProviderConfig,
    backend: Option<Arc<dyn TextBackend>>,
}

impl fmt::Debug for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Provider")
            .field("config", &self.config)
            .field("text_backend", &self.backend.is_some())
            .finish()
    }
}

impl Provider {
    /// Builds the provider the config describes. Remote providers read their
    /// credential here, so a missing key fails before any evidence is sent.
    pub fn from_config(config: ProviderConfig) -> Result<Self, ElicitError> {
        config.validate()?;
        match config.mode {
            ProviderMode::Simulated => Ok(Self { config, backend: None }),
            #[cfg(feature = "remote")]
            ProviderMode::Remote => {
                let backend = RemoteBackend::from_config(&config).map_err(|e| ElicitError::ProviderUnavailable {
                    provider: config.name.clone(),
                    reason: e.to_string(),
                })?;
                Ok(Self { config, backend: Some(Arc::new(backend)) })
            }
            #[cfg(not(feature = "remote"))]
            ProviderMode::Remote => Err(ElicitError::ProviderUnavailable {
                provider: config.name.clone(),
                reason: "built without the `remote` feature".into(),
            }),
        }
    }

    /// A provider answering through a caller-supplied text backend.
    pub fn with_backend(config: ProviderConfig, backend: Arc<dyn TextBackend>) -> Result<Self, ElicitError> {
        config.validate()?;
        Ok(Self { config, backend: Some(backend) })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    fn call_rng(&self, obs: &Observation, tag: u64, state: usize) -> rand_chacha::ChaCha8Rng {
        seed::rng(&[self.config.seed, obs.candidate_id, seed::label(&self.config.name), tag, state as u64])
    }

    fn features<'a>(&self, obs: &'a Observation) -> Result<&'a EvidenceFeatures, ElicitError> {
        obs.features.as_ref().ok_or_else(|| ElicitError::MissingFeatures(self.config.name.clone()))
    }

    /// Asks with retries; `None` means every attempt failed to parse.
    fn ask(&self, prompt: &str, obs: &Observation, backend: &dyn TextBackend) -> Result<Option<f64>, ElicitError> {
        for attempt in 0..=self.config.max_retries {
            let text = with_retry_suffix(prompt, attempt);
            let req = CompletionRequest {
                prompt: &text,
                temperature: self.config.temperature,
                max_tokens: self.config.max_tokens,
                attempt,
                candidate_id: obs.candidate_id,
            };
            match backend.complete(&req) {
                Ok(reply) => {
                    if let Ok(score) = parse_score(&reply) {
                        return Ok(Some(score));
                    }
                }
                Err(TransportError::Misconfigured(reason)) => {
                    return Err(ElicitError::ProviderUnavailable { provider: self.config.name.clone(), reason })
                }
                Err(TransportError::Failed(_)) => {}
            }
        }
        Ok(None)
    }

    /// One typicality estimate per state of `problem`.
    pub fn elicit(&self, obs: &Observation, problem: &DecisionProblem) -> Result<Vec<RawEstimate>, ElicitError> {
        let name = &self.config.name;
        match &self.backend {
            None => {
                let ev = self.features(obs)?;
                Ok((0..problem.n_states())
                    .map(|s| {
                        let mut rng = self.call_rng(obs, obs.kind.code(), s);
                        let score = simulated::simulate_score(ev, StateId(s), &self.config, &mut rng);
                        RawEstimate::new(name, StateId(s), score, false)
                    })
                    .collect())
            }
            Some(backend) => problem
                .states()
                .iter()
                .enumerate()
                .map(|(s, spec)| {
                    let prompt = build_contrastive_prompt(obs, &spec.description);
                    Ok(match self.ask(&prompt, obs, backend.as_ref())? {
                        Some(score) => RawEstimate::new(name, StateId(s), score, false),
                        None => RawEstimate::new(name, StateId(s), FALLBACK_SCORE, true),
                    })
                })
                .collect(),
        }
    }

    /// Single 0-10 quality rating for the discriminative baselines.
    /// Returns the score and whether the fallback was used.
    pub fn elicit_quality(&self, obs: &Observation) -> Result<(f64, bool), ElicitError> {
        match &self.backend {
            None => {
                let ev = self.features(obs)?;
                let mut rng = self.call_rng(obs, 3, 0);
                Ok((simulated::simulate_quality(ev, &self.config, &mut rng), false))
            }
            Some(backend) => Ok(match self.ask(&build_quality_prompt(obs), obs, backend.as_ref())? {
                Some(s) => (s, false),
                None => (FALLBACK_SCORE, true),
            }),
        }
    }
}

/// Free-function form of [`Provider::elicit`].
pub fn elicit(obs: &Observation, problem: &DecisionProblem, provider: &Provider) -> Result<Vec<RawEstimate>, ElicitError> {
    provider.elicit(obs, problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::sample_population;
    use crate::decision::hiring_problem;
    use std::sync::atomic::{AtomicU32, Ordering};

    struct Canned {
        replies: Vec<&'static str>,
        calls: AtomicU32,
    }

    impl TextBackend for Canned {
        fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, TransportError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            Ok(self.replies[(req.attempt as usize).min(self.replies.len() - 1)].to_string())
        }
    }

    struct Broken;
    impl TextBackend for Broken {
        fn complete(&self, _: &CompletionRequest<'_>) -> Result<String, TransportError> {
            Err(TransportError::Misconfigured("bad endpoint".into()))
        }
    }

    fn obs() -> Observation {
        let c = &sample_population(1, &hiring_problem(), 4).unwrap()[0];
        Observation::resume(c)
    }

    #[test]
    fn garbage_falls_back_after_all_retries() {
        let backend = Arc::new(Canned { replies: vec!["no idea"], calls: AtomicU32::new(0) });
        let p = Provider::with_backend(ProviderConfig::simulated("g"), backend.clone()).unwrap();
        let est = p.elicit(&obs(), &hiring_problem()).unwrap();
        assert_eq!(est.len(), 4);
        assert!(est.iter().all(|e| e.fallback_used && e.normalized == 0.5 && e.score == FALLBACK_SCORE));
        assert_eq!(backend.calls.load(Ordering::SeqCst), 4 * 4);
    }

    #[test]
    fn retry_recovers() {
        let backend = Arc::new(Canned { replies: vec!["hmm", "Score: 6"], calls: AtomicU32::new(0) });
        let p = Provider::with_backend(ProviderConfig::simulated("g"), backend).unwrap();
        let est = p.elicit(&obs(), &hiring_problem()).unwrap();
        assert!(est.iter().all(|e| !e.fallback_used && e.score == 6.0 && e.normalized == 0.6));
    }

    #[test]
    fn misconfigured_transport_is_an_error() {
        let p = Provider::with_backend(ProviderConfig::simulated("x"), Arc::new(Broken)).unwrap();
        assert!(matches!(p.elicit(&obs(), &hiring_problem()), Err(ElicitError::ProviderUnavailable { .. })));
    }

    #[test]
    fn simulated_is_repeatable_and_complete() {
        let cfg = ProviderConfig { noise_sd: 0.3, seed: 5, ..ProviderConfig::simulated("s") };
        let p = Provider::from_config(cfg).unwrap();
        let o = obs();
        let a = p.elicit(&o, &hiring_problem()).unwrap();
        assert_eq!(a, p.elicit(&o, &hiring_problem()).unwrap());
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|e| e.normalized == e.score / 10.0));
    }

    #[test]
    fn simulated_needs_features() {
        let p = Provider::from_config(ProviderConfig::simulated("s")).unwrap();
        let mut o = obs();
        o.features = None;
        assert!(matches!(p.elicit(&o, &hiring_problem()), Err(ElicitError::MissingFeatures(_))));
    }

    #[test]
    fn config_validation() {
        let bad = ProviderConfig { temperature: -0.1, ..ProviderConfig::simulated("a") };
        assert!(bad.validate().is_err());
        let remote = ProviderConfig { mode: ProviderMode::Remote, ..ProviderConfig::simulated("r") };
        assert!(remote.validate().is_err());
        let emph = ProviderConfig {
            bias_profile: BiasProfile { emphasis: Some(vec![1.0; 5]), ..Default::default() },
            ..ProviderConfig::simulated("e")
        };
        assert!(emph.validate().is_err());
    }

    #[test]
    fn bias_offsets_sum_over_matching_keys() {
        use crate::datagen::{Ethnicity, Gender};
        let b = simulated::reference_bias(0);
        let d = Demographics { gender: Gender::Female, ethnicity: Ethnicity::Black };
        assert!((b.offset(&d, None) - (-0.62 - 1.82)).abs() < 1e-12);
        let m = Demographics { gender: Gender::Male, ethnicity: Ethnicity::White };
        assert_eq!(b.offset(&m, None), 0.0);
    }
}
