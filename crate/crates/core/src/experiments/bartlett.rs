//! Direct `2·log(vol_d(ΦS)/vol_d(S))` against the sum of independent
//! log chi-squares with the same law.

use rayon::prelude::*;
use serde::Serialize;

use super::lemma1::{direct_log_ratio, fixed_matrix, FIXED_ROLE, TRIAL_ROLE};
use super::stats::{ks_two_sample, mean_and_variance, KsTest};
use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::measurement::bartlett_logdet_sample;
use crate::subspace::log_volume;

const ORACLE_ROLE: u64 = 150;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BartlettReport {
    pub m: usize,
    pub d: usize,
    pub ks: KsTest,
    pub direct_mean: f64,
    pub direct_variance: f64,
    pub oracle_mean: f64,
    pub oracle_variance: f64,
    /// `√(v₁/n₁ + v₂/n₂)`.
    pub combined_std_error: f64,
    pub pass: bool,
    #[serde(skip)]
    pub direct: Vec<f64>,
    #[serde(skip)]
    pub oracle: Vec<f64>,
}

impl BartlettReport {
    /// `|v₁ − v₂| / v₂`.
    pub fn variance_relative_difference(&self) -> f64 {
        (self.direct_variance - self.oracle_variance).abs() / self.oracle_variance
    }
}

/// Compares two samples: KS p-value above 0.01 and means within four
/// combined standard errors.
pub fn compare_samples(m: usize, d: usize, direct: Vec<f64>, oracle: Vec<f64>) -> Result<BartlettReport> {
    let ks = ks_two_sample(&direct, &oracle)?;
    let (dm, dv) = mean_and_variance(&direct)?;
    let (om, ov) = mean_and_variance(&oracle)?;
    let (dv, ov) = match (dv, ov) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::BadShape("need at least two samples per pipeline".into())),
    };
    let se = (dv / direct.len() as f64 + ov / oracle.len() as f64).sqrt();
    let pass = ks.p_value > 0.01 && (dm - om).abs() <= 4.0 * se;
    Ok(BartlettReport {
        m,
        d,
        ks,
        direct_mean: dm,
        direct_variance: dv,
        oracle_mean: om,
        oracle_variance: ov,
        combined_std_error: se,
        pass,
        direct,
        oracle,
    })
}

/// Uses the first entry of `m_values`.
pub fn run_bartlett_equivalence(cfg: &ExperimentConfig) -> Result<BartlettReport> {
    let m = *cfg.m_values.first().ok_or(Error::Empty)?;
    let s = fixed_matrix(cfg.n, cfg.d, cfg.stream(FIXED_ROLE));
    let log_vol_s = log_volume(&s)?.log_value;
    let direct_stream = cfg.stream(TRIAL_ROLE);
    let direct: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| Ok(2.0 * direct_log_ratio(&s, log_vol_s, m, direct_stream.substream(t as u64))?))
        .collect::<Result<_>>()?;
    let oracle_stream = cfg.stream(ORACLE_ROLE);
    let oracle: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| bartlett_logdet_sample(m, cfg.d, oracle_stream.substream(t as u64)))
        .collect::<Result<_>>()?;
    compare_samples(m, cfg.d, direct, oracle)
}
