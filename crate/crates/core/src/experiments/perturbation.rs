//! Deterministic checks on small column perturbations of a well-conditioned
//! unit-column basis: singular value gaps, the volume envelope and the
//! minimum column distance.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::measurement::{gaussian_matrix, random_orthonormal_frame, SeedSpec};
use crate::subspace::{column_normalize, log_volume, min_pairwise_column_distance, singular_values};
use crate::theory::{min_column_distance_floor, perturbation_envelope, smallest_singular_floor, PerturbationEnvelope};

const TRIAL_ROLE: u64 = 400;
const MAX_REJECTIONS: usize = 10_000;

/// Whether `vol_d(s) > c_s`. Rank-deficient matrices have volume zero.
pub fn satisfies_volume_floor(s: &DenseMatrix, c_s: f64) -> Result<bool> {
    match log_volume(s) {
        Ok(v) => Ok(v.log_value > c_s.ln()),
        Err(Error::RankDeficient { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationTrial {
    pub trial: usize,
    pub seed: SeedSpec,
    pub max_sv_gap: f64,
    pub bound: f64,
    pub vol_lo: f64,
    pub vol: f64,
    pub vol_hi: f64,
    pub min_col_dist: f64,
    pub floor: f64,
    pub gap_ok: bool,
    pub envelope_ok: bool,
    pub distance_ok: bool,
}

impl PerturbationTrial {
    pub fn pass(&self) -> bool {
        self.gap_ok && self.envelope_ok && self.distance_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub envelope: PerturbationEnvelope,
    pub c_s: f64,
    pub trials: Vec<PerturbationTrial>,
}

impl PerturbationReport {
    pub fn violations(&self) -> Vec<&PerturbationTrial> {
        self.trials.iter().filter(|t| !t.pass()).collect()
    }

    pub fn pass(&self) -> bool {
        self.trials.iter().all(PerturbationTrial::pass)
    }
}

/// Unit-column `n×d` matrix inside the span of `frame`, redrawn until its
/// volume exceeds `c_s`.
fn sample_well_conditioned<R: Rng + ?Sized>(rng: &mut R, frame: &nalgebra::DMatrix<f64>, d: usize, c_s: f64) -> Result<DenseMatrix> {
    for _ in 0..MAX_REJECTIONS {
        let s = column_normalize(&DenseMatrix::from(frame * gaussian_matrix(rng, frame.ncols(), d)))?;
        if satisfies_volume_floor(&s, c_s)? {
            return Ok(s);
        }
    }
    Err(Error::Domain(format!("no basis with volume above {c_s} in {MAX_REJECTIONS} draws")))
}

/// Perturbation inside the span of `frame`, column `j` of norm `δ₀·u_j`
/// with `u_j` uniform on `(0, 1]`.
fn sample_perturbation<R: Rng + ?Sized>(rng: &mut R, frame: &nalgebra::DMatrix<f64>, d: usize, delta0: f64) -> Result<DenseMatrix> {
    let mut e = frame * gaussian_matrix(rng, frame.ncols(), d);
    for mut col in e.column_iter_mut() {
        let scale = delta0 * (1.0 - rng.random::<f64>());
        let norm = col.norm();
        col *= scale / norm;
    }
    DenseMatrix::new(e)
}

pub fn perturbation_trial(
    trial: usize,
    seed: SeedSpec,
    n: usize,
    k: usize,
    env: &PerturbationEnvelope,
    c_s: f64,
) -> Result<PerturbationTrial> {
    let d = env.d;
    let mut rng = seed.rng();
    let frame = random_orthonormal_frame(&mut rng, n, k);
    let s = sample_well_conditioned(&mut rng, &frame, d, c_s)?;
    let e = sample_perturbation(&mut rng, &frame, d, env.delta0)?;
    let q = DenseMatrix::from(s.as_inner() + e.as_inner());

    let sigma = singular_values(&s);
    let tau = singular_values(&q);
    let max_sv_gap = sigma.iter().zip(&tau).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let bound = (d as f64).sqrt() * env.delta0;

    let vol_s = log_volume(&s)?.volume();
    let vol = log_volume(&q)?.volume();
    let (vol_lo, vol_hi) = env.perturbed_volume_interval(vol_s);

    let min_col_dist = min_pairwise_column_distance(&s)?;
    let floor = min_column_distance_floor(c_s);
    Ok(PerturbationTrial {
        trial,
        seed,
        max_sv_gap,
        bound,
        vol_lo,
        vol,
        vol_hi,
        min_col_dist,
        floor,
        gap_ok: max_sv_gap <= bound,
        envelope_ok: vol_lo <= vol && vol <= vol_hi,
        distance_ok: min_col_dist > floor,
    })
}

/// `extra` keys: `c_s` (0.3), `delta0` (1e-3), `c_phi` (1) and `delta_s2`
/// (defaults to `delta0`, or half its admissible limit when `delta0 = 0`).
pub fn run_perturbation_check(cfg: &ExperimentConfig) -> Result<PerturbationReport> {
    let c_s = cfg.extra_or("c_s", 0.3);
    let delta0 = cfg.extra_or("delta0", 1e-3);
    let c_phi = cfg.extra_or("c_phi", 1.0);
    let default_s2 = if delta0 > 0.0 {
        delta0
    } else {
        smallest_singular_floor(c_s, cfg.d) / (2.0 * (cfg.d as f64).sqrt())
    };
    let delta_s2 = cfg.extra_or("delta_s2", default_s2);
    let envelope = perturbation_envelope(c_s, cfg.d, delta_s2, c_phi, delta0)?;
    let stream = cfg.stream(TRIAL_ROLE);
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| perturbation_trial(t, stream.substream(t as u64), cfg.n, cfg.k, &envelope, c_s))
        .collect::<Result<_>>()?;
    Ok(PerturbationReport { envelope, c_s, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::desk(ExperimentKind::Perturbation);
        cfg.n = 40;
        cfg.k = 6;
        cfg.d = 4;
        cfg.trials = 50;
        cfg
    }

    #[test]
    fn small_run_has_no_violations() {
        let r = run_perturbation_check(&small()).unwrap();
        assert!(r.pass(), "{:?}", r.violations());
        assert_eq!(r, run_perturbation_check(&small()).unwrap());
    }

    #[test]
    fn zero_perturbation_is_exact() {
        let mut cfg = small();
        cfg.extra.insert("delta0".into(), 0.0);
        let r = run_perturbation_check(&cfg).unwrap();
        for t in &r.trials {
            assert_eq!(t.max_sv_gap, 0.0);
            assert_eq!((t.vol_lo, t.vol_hi), (t.vol, t.vol));
        }
    }

    #[test]
    fn volume_floor_excludes_duplicate_columns() {
        let dup = DenseMatrix::from_row_major(3, 2, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(!satisfies_volume_floor(&dup, 0.1).unwrap());
        let near = DenseMatrix::from_row_major(2, 2, &[1.0, 0.99, 0.0, 0.141]).unwrap();
        assert!(!satisfies_volume_floor(&near, 0.3).unwrap());
        assert!(satisfies_volume_floor(&DenseMatrix::identity_columns(3, 2), 0.3).unwrap());
    }

    #[test]
    fn invalid_delta_s2_is_rejected() {
        let mut cfg = small();
        cfg.extra.insert("delta_s2".into(), 1.0);
        assert!(matches!(run_perturbation_check(&cfg), Err(Error::Domain(_))));
    }
}
