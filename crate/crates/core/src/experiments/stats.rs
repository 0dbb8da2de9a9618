//! Summary statistics and the two-sample Kolmogorov–Smirnov test.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// One Monte Carlo observation next to its analytic prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub m: usize,
    pub observed: f64,
    pub center: f64,
    pub deviation: f64,
}

impl TrialRecord {
    pub fn new(trial_index: usize, m: usize, observed: f64, center: f64) -> Self {
        Self { trial_index, m, observed, center, deviation: observed - center }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample standard deviation; absent for a single value.
    pub std_dev: Option<f64>,
    /// `std_dev / √count`; absent for a single value.
    pub std_error: Option<f64>,
    pub q01: f64,
    pub q50: f64,
    pub q99: f64,
    pub max_abs_deviation: f64,
}

impl SummaryStats {
    /// Whether the mean lies within `k` standard errors of `center`.
    /// False when the standard error is undefined.
    pub fn mean_within(&self, center: f64, k: f64) -> bool {
        match self.std_error {
            Some(se) => (self.mean - center).abs() <= k * se,
            None => false,
        }
    }
}

pub fn summarize(records: &[TrialRecord]) -> Result<SummaryStats> {
    let values: Vec<f64> = records.iter().map(|r| r.observed).collect();
    let deviations: Vec<f64> = records.iter().map(|r| r.deviation).collect();
    summarize_parts(&values, &deviations)
}

/// Summary of raw samples; deviations are taken from the sample mean.
pub fn summarize_values(values: &[f64]) -> Result<SummaryStats> {
    let (mean, _) = mean_and_variance(values)?;
    let deviations: Vec<f64> = values.iter().map(|v| v - mean).collect();
    summarize_parts(values, &deviations)
}

fn summarize_parts(values: &[f64], deviations: &[f64]) -> Result<SummaryStats> {
    let (mean, var) = mean_and_variance(values)?;
    let count = values.len();
    let std_dev = var.map(f64::sqrt);
    let std_error = std_dev.map(|s| s / (count as f64).sqrt());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(SummaryStats {
        count,
        mean,
        std_dev,
        std_error,
        q01: quantile_sorted(&sorted, 0.01),
        q50: quantile_sorted(&sorted, 0.50),
        q99: quantile_sorted(&sorted, 0.99),
        max_abs_deviation: deviations.iter().fold(0.0, |acc, d| acc.max(d.abs())),
    })
}

/// Mean and unbiased variance (absent for one value).
pub fn mean_and_variance(values: &[f64]) -> Result<(f64, Option<f64>)> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, None));
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((mean, Some(ss / (n - 1.0))))
}

/// Linear interpolation between order statistics at `(n − 1)p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample KS statistic with the asymptotic p-value at effective size
/// `n₁n₂/(n₁+n₂)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let ne = n1 * n2 / (n1 + n2);
    let sq = ne.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    Ok(KsTest { statistic: d, p_value: kolmogorov_survival(lambda) })
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Theta-function form, fast for small λ.
        let c = -PI * PI / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for j in 1..=20 {
            let odd = (2 * j - 1) as f64;
            let term = (c * odd * odd).exp();
            cdf += term;
            if term < 1e-17 * cdf {
                break;
            }
        }
        (1.0 - (2.0 * PI).sqrt() / lambda * cdf).max(0.0)
    } else {
        let a = -2.0 * lambda * lambda;
        let mut sum = 0.0;
        let mut sign = 1.0;
        for j in 1..=100 {
            let jf = j as f64;
            let term = (a * jf * jf).exp();
            sum += sign * term;
            if term < 1e-17 * sum.abs() {
                break;
            }
            sign = -sign;
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}
