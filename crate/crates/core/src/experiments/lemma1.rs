//! Concentration of `log(vol_d(ΦS)/vol_d(S))` around its center for a fixed
//! `S` and fresh Gaussian `Φ` per trial.

use rayon::prelude::*;

use super::stats::{summarize, TrialRecord};
use super::ExperimentConfig;
use super::output::PerMSummary;
use crate::error::Result;
use crate::matrix::DenseMatrix;
use crate::measurement::{compress, gaussian_matrix, sample_measurement, SeedSpec};
use crate::subspace::log_volume;
use crate::theory::volume_ratio_center;

pub(crate) const FIXED_ROLE: u64 = 0;
pub(crate) const TRIAL_ROLE: u64 = 100;

/// The fixed `n×d` Gaussian matrix shared by every trial.
pub fn fixed_matrix(n: usize, d: usize, seed: SeedSpec) -> DenseMatrix {
    DenseMatrix::from(gaussian_matrix(&mut seed.rng(), n, d))
}

/// `log vol_d(ΦS) − log_vol_s` for one fresh `Φ`.
pub fn direct_log_ratio(s: &DenseMatrix, log_vol_s: f64, m: usize, seed: SeedSpec) -> Result<f64> {
    let phi = sample_measurement(m, s.rows(), seed)?;
    Ok(log_volume(&compress(&phi, s)?)?.log_value - log_vol_s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Result {
    pub records: Vec<TrialRecord>,
    pub per_m: Vec<PerMSummary>,
}

impl Lemma1Result {
    pub fn pass(&self) -> bool {
        self.per_m.iter().all(|s| s.pass)
    }
}

pub fn run_lemma1_concentration(cfg: &ExperimentConfig) -> Result<Lemma1Result> {
    let s = fixed_matrix(cfg.n, cfg.d, cfg.stream(FIXED_ROLE));
    let log_vol_s = log_volume(&s)?.log_value;
    let mut records = Vec::with_capacity(cfg.m_values.len() * cfg.trials);
    let mut per_m = Vec::with_capacity(cfg.m_values.len());
    for (mi, &m) in cfg.m_values.iter().enumerate() {
        let center = volume_ratio_center(m, cfg.d)?;
        let stream = cfg.stream(TRIAL_ROLE + mi as u64);
        let batch: Vec<TrialRecord> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let ratio = direct_log_ratio(&s, log_vol_s, m, stream.substream(t as u64))?;
                Ok(TrialRecord::new(t, m, ratio, center))
            })
            .collect::<Result<_>>()?;
        let stats = summarize(&batch)?;
        per_m.push(PerMSummary { m, center, pass: stats.mean_within(center, 4.0), stats });
        records.extend(batch);
    }
    Ok(Lemma1Result { records, per_m })
}
