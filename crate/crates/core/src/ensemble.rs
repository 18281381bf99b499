//! Robust aggregation of per-provider likelihood estimates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::LikelihoodVector;

/// Guard on the mean in the coefficient of variation.
pub const CV_EPS: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("panel has no providers or no states")]
    EmptyPanel,
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedMatrix { row: usize, expected: usize, got: usize },
    #[error("disagreement needs at least two providers, got {0}")]
    InsufficientProviders(usize),
    #[error("estimate {0} outside [0, 1]")]
    OutOfRange(f64),
}

/// Sample median. Even lengths use the midpoint of the two central values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn check_matrix(estimates: &[Vec<f64>]) -> Result<usize, EnsembleError> {
    let k = estimates.first().map(Vec::len).ok_or(EnsembleError::EmptyPanel)?;
    if k == 0 {
        return Err(EnsembleError::EmptyPanel);
    }
    for (row, r) in estimates.iter().enumerate() {
        if r.len() != k {
            return Err(EnsembleError::RaggedMatrix { row, expected: k, got: r.len() });
        }
        if let Some(x) = r.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(EnsembleError::OutOfRange(*x));
        }
    }
    Ok(k)
}

fn column(estimates: &[Vec<f64>], s: usize) -> Vec<f64> {
    estimates.iter().map(|row| row[s]).collect()
}

/// Per-state median over providers. `estimates` is indexed `(provider, state)`.
pub fn aggregate_median(estimates: &[Vec<f64>]) -> Result<LikelihoodVector, EnsembleError> {
    let k = check_matrix(estimates)?;
    let agg = (0..k)
        .map(|s| median(&column(estimates, s)).expect("non-empty column"))
        .collect();
    Ok(LikelihoodVector::new(agg).expect("median of values in [0, 1]"))
}

/// Sample standard deviation over the guarded mean.
pub fn disagreement_cv(column: &[f64]) -> Result<f64, EnsembleError> {
    let m = column.len();
    if m < 2 {
        return Err(EnsembleError::InsufficientProviders(m));
    }
    let mean = column.iter().sum::<f64>() / m as f64;
    let var = column.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    Ok(var.sqrt() / mean.max(CV_EPS))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodPanel {
    pub per_provider: Vec<Vec<f64>>,
    pub aggregated: LikelihoodVector,
    pub disagreement: Vec<f64>,
    pub max_disagreement: f64,
}

/// Builds a panel with medians and per-state CVs. Needs at least two providers.
pub fn build_panel(estimates: Vec<Vec<f64>>) -> Result<LikelihoodPanel, EnsembleError> {
    let k = check_matrix(&estimates)?;
    if estimates.len() < 2 {
        return Err(EnsembleError::InsufficientProviders(estimates.len()));
    }
    let aggregated = aggregate_median(&estimates)?;
    let disagreement = (0..k)
        .map(|s| disagreement_cv(&column(&estimates, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let max_disagreement = disagreement.iter().copied().fold(0.0, f64::max);
    Ok(LikelihoodPanel { per_provider: estimates, aggregated, disagreement, max_disagreement })
}

/// Panel for a single provider: the aggregate is the provider's own row and
/// disagreement is recorded as zero. Callers must not gate on it.
pub fn single_provider_panel(row: Vec<f64>) -> Result<LikelihoodPanel, EnsembleError> {
    let estimates = vec![row];
    let k = check_matrix(&estimates)?;
    let aggregated = aggregate_median(&estimates)?;
    Ok(LikelihoodPanel {
        per_provider: estimates,
        aggregated,
        disagreement: vec![0.0; k],
        max_disagreement: 0.0,
    })
}
