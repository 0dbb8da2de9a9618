//! Log sine-product ratios of compressed subspace pairs with random
//! prescribed principal angles.
//!
//! Angles are drawn i.i.d. uniform on `(θ_min, π/2]` and the whole set is
//! redrawn while `Σ ln sin θ_i` falls below the floor. By default each angle
//! set gets its own `Φ`, shared by that set's pairs.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::output::PerMSummary;
use super::stats::{summarize, TrialRecord};
use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::measurement::{
    compress, sample_measurement, subspace_pair_with_angles, AnglePrescription, MeasurementMatrix,
};
use crate::subspace::{log_product_principal_sines, Subspace};
use crate::theory::sine_product_center;

const SET_ROLE: u64 = 200;
const GLOBAL_PHI_ROLE: u64 = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem2Record {
    pub m: usize,
    pub k: usize,
    pub trial: usize,
    pub log_sines_original: f64,
    pub log_sines_compressed: f64,
    pub center: f64,
}

impl Theorem2Record {
    pub fn log_ratio(&self) -> f64 {
        self.log_sines_compressed - self.log_sines_original
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Result {
    pub records: Vec<Theorem2Record>,
    pub per_m: Vec<PerMSummary>,
}

impl Theorem2Result {
    pub fn pass(&self) -> bool {
        self.per_m.iter().all(|s| s.pass)
    }
}

/// Draws `k` angles uniform on `(theta_min, π/2]` until their log
/// sine-product reaches `floor`.
pub fn sample_prescription<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    theta_min: f64,
    floor: f64,
    max_attempts: usize,
) -> Result<AnglePrescription> {
    if !(0.0..FRAC_PI_2).contains(&theta_min) {
        return Err(Error::BadAngles(format!("theta_min must lie in [0, π/2), got {theta_min}")));
    }
    let width = FRAC_PI_2 - theta_min;
    for _ in 0..max_attempts {
        let angles: Vec<f64> = (0..k).map(|_| FRAC_PI_2 - rng.random::<f64>() * width).collect();
        let p = AnglePrescription::new(angles)?;
        if p.log_product_sines() >= floor {
            return Ok(p);
        }
    }
    Err(Error::BadAngles(format!("no prescription above floor {floor} in {max_attempts} attempts")))
}

fn compressed_log_sines(phi: &MeasurementMatrix, x: &Subspace, y: &Subspace) -> Result<f64> {
    let px = Subspace::new(compress(phi, x.basis())?)?;
    let py = Subspace::new(compress(phi, y.basis())?)?;
    log_product_principal_sines(&px, &py)
}

pub fn run_theorem2_scatter(cfg: &ExperimentConfig) -> Result<Theorem2Result> {
    let (n, k) = (cfg.n, cfg.k);
    let floor = cfg.extra_or("floor", -5.0);
    let theta_min = cfg.extra_or("theta_min", 0.0);
    let pairs = cfg.extra_or("pairs_per_set", 1.0) as usize;
    let global_phi = cfg.extra_or("global_phi", 0.0) != 0.0;
    let max_attempts = cfg.extra_or("max_attempts", 10_000.0) as usize;
    if pairs == 0 {
        return Err(Error::BadShape("pairs_per_set must be positive".into()));
    }

    let mut records = Vec::with_capacity(cfg.m_values.len() * cfg.trials * pairs);
    let mut per_m = Vec::with_capacity(cfg.m_values.len());
    for (mi, &m) in cfg.m_values.iter().enumerate() {
        let center = sine_product_center(m, k)?;
        let sets = cfg.stream(SET_ROLE + mi as u64);
        let shared = if global_phi {
            Some(sample_measurement(m, n, cfg.stream(GLOBAL_PHI_ROLE + mi as u64))?)
        } else {
            None
        };
        let batches: Vec<Vec<Theorem2Record>> = (0..cfg.trials)
            .into_par_iter()
            .map(|set| {
                let seed = sets.substream(set as u64);
                let prescription = sample_prescription(&mut seed.rng(), k, theta_min, floor, max_attempts)?;
                let fresh;
                let phi = match &shared {
                    Some(phi) => phi,
                    None => {
                        fresh = sample_measurement(m, n, seed.substream(0))?;
                        &fresh
                    }
                };
                (0..pairs)
                    .map(|p| {
                        let (x, y) = subspace_pair_with_angles(n, k, &prescription, seed.substream(1 + p as u64))?;
                        Ok(Theorem2Record {
                            m,
                            k,
                            trial: set * pairs + p,
                            log_sines_original: log_product_principal_sines(&x, &y)?,
                            log_sines_compressed: compressed_log_sines(phi, &x, &y)?,
                            center,
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let batch: Vec<Theorem2Record> = batches.into_iter().flatten().collect();
        let trial_records: Vec<TrialRecord> =
            batch.iter().map(|r| TrialRecord::new(r.trial, m, r.log_ratio(), center)).collect();
        let stats = summarize(&trial_records)?;
        per_m.push(PerMSummary { m, center, pass: stats.mean_within(center, 4.0), stats });
        records.extend(batch);
    }
    Ok(Theorem2Result { records, per_m })
}
