//! Deterministic stand-in for a generative scorer.
//!
//! A provider reads evidence as a position on the ordinal state scale
//! `[0, 3]`. For a resume the position is a weighted average of per-feature
//! positions, each weighted by the provider's emphasis, mapped affinely so
//! that the average weak and average strong resume land near 0 and 3. For a
//! phone screen it is the latent performance interpolated onto the same
//! scale. Bias offsets shift the perceived position by `offset / BIAS_SCALE`
//! states, so one score point of bias moves the reading by 0.4 states.
//!
//! The typicality of hypothesized state `h` is `PEAK_SCORE * DECAY^|pos - h|`
//! floored at `FLOOR_SCORE`, plus Gaussian noise, clamped to `[0, 10]`.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{BiasProfile, EvidenceFeatures, ProviderConfig};
use crate::datagen::{feature_positions, Demographics, ResumeFeatures};
use crate::decision::StateId;

pub const PEAK_SCORE: f64 = 8.0;
pub const DECAY: f64 = 0.5;
pub const FLOOR_SCORE: f64 = 1.0;
/// Score points per state step; converts bias offsets into position shifts.
pub const BIAS_SCALE: f64 = 2.5;
/// Affine map from mean feature position to the state scale.
const POSITION_CENTER: f64 = 0.57;
const POSITION_SPAN: f64 = 0.63;
/// Screen performance knots mapped onto states 0..=3.
const SCREEN_KNOTS: [f64; 4] = [2.0, 5.0, 7.0, 9.0];
pub const MAX_POSITION: f64 = 3.0;

/// Number of resume features a provider can weigh.
pub const N_FEATURES: usize = 6;

/// Noise-free typicality of state `h` for evidence read at `position`.
pub fn base_score(position: f64, h: StateId) -> f64 {
    (PEAK_SCORE * DECAY.powf((position - h.0 as f64).abs())).max(FLOOR_SCORE)
}

/// Unbiased position of a resume under the given feature weights.
pub fn resume_position(features: &ResumeFeatures, emphasis: &[f64; N_FEATURES]) -> f64 {
    let fp = feature_positions(features);
    let wsum: f64 = emphasis.iter().sum();
    let mean = fp.iter().zip(emphasis).map(|(p, w)| p * w).sum::<f64>() / wsum;
    (mean - POSITION_CENTER) / POSITION_SPAN
}

/// Screen performance interpolated onto `[0, 3]`.
pub fn screen_position(performance: f64) -> f64 {
    let k = &SCREEN_KNOTS;
    if performance <= k[0] {
        return 0.0;
    }
    for i in 1..k.len() {
        if performance <= k[i] {
            return (i - 1) as f64 + (performance - k[i - 1]) / (k[i] - k[i - 1]);
        }
    }
    MAX_POSITION
}

fn demographics(evidence: &EvidenceFeatures) -> &Demographics {
    match evidence {
        EvidenceFeatures::Resume { demographics, .. }
        | EvidenceFeatures::PhoneScreen { demographics, .. }
        | EvidenceFeatures::Combined { demographics, .. } => demographics,
    }
}

/// Total additive bias (in score points) the profile applies to this evidence.
pub fn bias_offset(evidence: &EvidenceFeatures, profile: &BiasProfile) -> f64 {
    let features = match evidence {
        EvidenceFeatures::Resume { features, .. } | EvidenceFeatures::Combined { features, .. } => Some(features),
        EvidenceFeatures::PhoneScreen { .. } => None,
    };
    profile.offset(demographics(evidence), features)
}

/// Position before bias.
pub fn unbiased_position(evidence: &EvidenceFeatures, profile: &BiasProfile) -> f64 {
    match evidence {
        EvidenceFeatures::Resume { features, .. } => resume_position(features, &profile.emphasis_weights()),
        EvidenceFeatures::PhoneScreen { performance, .. } => screen_position(*performance),
        // Read at a single glance: the two readings are averaged.
        EvidenceFeatures::Combined { features, performance, .. } => {
            0.5 * (resume_position(features, &profile.emphasis_weights()) + screen_position(*performance))
        }
    }
}

/// Position as this provider perceives it, bias included.
pub fn perceived_position(evidence: &EvidenceFeatures, profile: &BiasProfile) -> f64 {
    unbiased_position(evidence, profile) + bias_offset(evidence, profile) / BIAS_SCALE
}

fn noise<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    if sd > 0.0 {
        Normal::new(0.0, sd).expect("finite sd").sample(rng)
    } else {
        0.0
    }
}

/// Typicality score in `[0, 10]` for hypothesized state `h`.
pub fn simulate_score<R: Rng + ?Sized>(
    evidence: &EvidenceFeatures,
    h: StateId,
    config: &ProviderConfig,
    rng: &mut R,
) -> f64 {
    let pos = perceived_position(evidence, &config.bias_profile);
    (base_score(pos, h) + noise(config.noise_sd, rng)).clamp(0.0, 10.0)
}

/// Single 0-10 quality rating used in discriminative mode. The unbiased
/// reading is `2 + BIAS_SCALE * position`; bias offsets are added to it in
/// score points, so matched pairs differ by exactly the configured offset
/// away from the clamp.
pub fn simulate_quality<R: Rng + ?Sized>(evidence: &EvidenceFeatures, config: &ProviderConfig, rng: &mut R) -> f64 {
    let p = &config.bias_profile;
    let raw = 2.0 + BIAS_SCALE * unbiased_position(evidence, p) + bias_offset(evidence, p) + noise(config.noise_sd, rng);
    raw.clamp(0.0, 10.0)
}

/// Matched-pairs bias offsets for five reference providers, columns
/// female, non-binary (vs male), Black, Hispanic, Asian (vs White).
pub const REFERENCE_OFFSETS: [(&str, [f64; 5]); 5] = [
    ("gpt-4o", [-0.62, -1.13, -1.82, -1.45, 0.23]),
    ("claude-3.5-sonnet", [-0.58, -0.71, -0.44, -0.52, 0.15]),
    ("gemini-pro", [0.41, 0.18, -0.18, -0.23, 0.33]),
    ("grok", [-0.22, -0.51, 0.31, 0.14, 0.09]),
    ("deepseek", [-0.09, -0.15, -0.08, -0.11, 0.52]),
];

/// Feature each reference provider over-weights: tier, projects, years,
/// tech stack and degree respectively.
const REFERENCE_EMPHASIS: [usize; 5] = [0, 4, 3, 5, 1];
pub const EMPHASIS_WEIGHT: f64 = 1.5;
pub const DEFAULT_NOISE_SD: f64 = 0.05;

pub fn reference_bias(index: usize) -> BiasProfile {
    let (_, o) = REFERENCE_OFFSETS[index];
    let keys = ["gender:female", "gender:non_binary", "ethnicity:black", "ethnicity:hispanic", "ethnicity:asian"];
    let mut emphasis = [1.0; N_FEATURES];
    emphasis[REFERENCE_EMPHASIS[index]] = EMPHASIS_WEIGHT;
    BiasProfile {
        demographic: keys.iter().zip(o).map(|(k, v)| (k.to_string(), v)).collect(),
        feature: Default::default(),
        emphasis: Some(emphasis.to_vec()),
    }
}

/// The five simulated reference providers, each with its own seed stream.
pub fn reference_roster(seed: u64) -> Vec<ProviderConfig> {
    REFERENCE_OFFSETS
        .iter()
        .enumerate()
        .map(|(i, (name, _))| ProviderConfig {
            bias_profile: reference_bias(i),
            noise_sd: DEFAULT_NOISE_SD,
            seed: seed.wrapping_add(i as u64),
            ..ProviderConfig::simulated(*name)
        })
        .collect()
}
