//! Resampling statistics.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("paired samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least one observation")]
    Empty,
    #[error("confidence level {0} outside (0, 1)")]
    BadLevel(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    let f = pos - i as f64;
    sorted[i] + f * (sorted[j] - sorted[i])
}

/// Percentile bootstrap interval for the total of `costs`.
pub fn bootstrap_total_ci(costs: &[f64], iterations: usize, level: f64, seed: u64) -> Result<Interval, StatsError> {
    if costs.is_empty() {
        return Err(StatsError::Empty);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::BadLevel(level));
    }
    let n = costs.len();
    let mut totals = crate::par::map_indexed(iterations.max(1), |i| {
        let mut rng = seed::rng(&[seed, i as u64, seed::label("bootstrap")]);
        (0..n).map(|_| costs[rng.random_range(0..n)]).sum::<f64>()
    });
    totals.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(Interval { lo: quantile(&totals, tail), hi: quantile(&totals, 1.0 - tail) })
}

/// Two-sided paired sign-flip permutation test on `T = sum(a - b)`.
/// The identity permutation is counted, so the p-value is never zero.
pub fn paired_permutation_test(a: &[f64], b: &[f64], iterations: usize, seed: u64) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let t = d.iter().sum::<f64>().abs();
    let scale: f64 = d.iter().map(|x| x.abs()).sum();
    let tol = 1e-9 * scale.max(1.0);
    let hits = crate::par::map_indexed(iterations, |i| {
        let mut rng = seed::rng(&[seed, i as u64, seed::label("permutation")]);
        let ts: f64 = d.iter().map(|x| if rng.random::<bool>() { *x } else { -x }).sum();
        (ts.abs() >= t - tol) as usize
    })
    .into_iter()
    .sum::<usize>();
    Ok((hits + 1) as f64 / (iterations + 1) as f64)
}

/// Per-comparison significance threshold.
pub fn bonferroni(alpha: f64, comparisons: usize) -> f64 {
    alpha / comparisons.max(1) as f64
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(pearson(&ranks(x), &ranks(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn permutation_examples() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(paired_permutation_test(&a, &a, 2000, 1).unwrap(), 1.0);
        let b: Vec<f64> = (0..1000).map(|i| 5000.0 + i as f64).collect();
        let a: Vec<f64> = b.iter().map(|x| x - 1000.0).collect();
        assert!(paired_permutation_test(&a, &b, 10_000, 1).unwrap() <= 0.001);
        assert_eq!(paired_permutation_test(&a, &b[1..], 10, 1), Err(StatsError::LengthMismatch(1000, 999)));
        assert_eq!(bonferroni(0.05, 10), 0.005);
    }

    #[test]
    fn bootstrap_examples() {
        let flat = vec![150.0; 40];
        let ci = bootstrap_total_ci(&flat, 1000, 0.95, 3).unwrap();
        assert_abs_diff_eq!(ci.lo, 6000.0, epsilon = 1e-6);
        assert_abs_diff_eq!(ci.hi, 6000.0, epsilon = 1e-6);
        let costs: Vec<f64> = (0..200).map(|i| ((i * 37) % 11) as f64 * 100.0).collect();
        let ci = bootstrap_total_ci(&costs, 2000, 0.95, 3).unwrap();
        let total: f64 = costs.iter().sum();
        assert!(ci.lo <= total && total <= ci.hi);
        let doubled: Vec<f64> = costs.iter().map(|c| 2.0 * c).collect();
        let ci2 = bootstrap_total_ci(&doubled, 2000, 0.95, 3).unwrap();
        assert_abs_diff_eq!(ci2.lo, 2.0 * ci.lo, epsilon = 1e-9);
        assert_abs_diff_eq!(ci2.hi, 2.0 * ci.hi, epsilon = 1e-9);
        assert_eq!(bootstrap_total_ci(&[], 10, 0.95, 0), Err(StatsError::Empty));
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(spearman(&x, &[10.0, 20.0, 30.0, 40.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0, epsilon = 1e-12);
        assert_eq!(ranks(&[3.0, 1.0, 3.0]), vec![2.5, 1.0, 2.5]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn permutation_p_in_unit_interval_and_symmetric(
            pairs in proptest::collection::vec((0.0f64..1000.0, 0.0f64..1000.0), 1..40),
            seed in any::<u64>(),
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let p = paired_permutation_test(&a, &b, 200, seed).unwrap();
            let q = paired_permutation_test(&b, &a, 200, seed).unwrap();
            prop_assert!(p > 0.0 && p <= 1.0);
            prop_assert_eq!(p, q);
        }
    }
}
