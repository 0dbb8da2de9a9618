use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::SeedSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Fig1,
    Lemma1,
    Bartlett,
    Theorem2,
    Perturbation,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Fig1 => "fig1",
            Self::Lemma1 => "lemma1",
            Self::Bartlett => "bartlett",
            Self::Theorem2 => "theorem2",
            Self::Perturbation => "perturbation",
        };
        f.write_str(s)
    }
}

/// Inputs of one experiment run.
///
/// Per-experiment knobs live in `extra`:
/// - theorem2: `floor` (−5), `theta_min` (0), `pairs_per_set` (1),
///   `global_phi` (0), `max_attempts` (10000)
/// - perturbation: `c_s` (0.3), `delta0` (1e-3), `delta_s2`, `c_phi` (1)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: ExperimentKind,
    pub n: usize,
    pub m_values: Vec<usize>,
    pub k: usize,
    pub d: usize,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    /// Sizes that finish in seconds to a minute on one core.
    pub fn desk(name: ExperimentKind) -> Self {
        let (n, m_values, k, d, trials) = match name {
            ExperimentKind::Fig1 => (0, (50..=2000).step_by(50).collect(), 0, 40, 1),
            ExperimentKind::Lemma1 => (1000, vec![200], 20, 20, 5000),
            ExperimentKind::Bartlett => (300, vec![100], 8, 8, 20_000),
            ExperimentKind::Theorem2 => (400, vec![100, 200], 5, 5, 2000),
            ExperimentKind::Perturbation => (200, vec![], 20, 8, 500),
        };
        Self { name, n, m_values, k, d, trials, master_seed: 1, extra: BTreeMap::new() }
    }

    /// Full-size settings. Long running.
    pub fn full(name: ExperimentKind) -> Self {
        let mut cfg = Self::desk(name);
        match name {
            ExperimentKind::Fig1 => {
                cfg.m_values = (50..=5000).step_by(50).collect();
                cfg.d = 40;
            }
            ExperimentKind::Lemma1 => {
                cfg.n = 10_000;
                cfg.m_values = (100..=5000).step_by(100).collect();
                cfg.d = 50;
                cfg.k = 50;
                cfg.trials = 1000;
            }
            ExperimentKind::Theorem2 => {
                cfg.n = 5000;
                cfg.m_values = vec![500, 1000];
                cfg.k = 10;
                cfg.trials = 800;
                cfg.extra.insert("pairs_per_set".into(), 100.0);
            }
            ExperimentKind::Bartlett | ExperimentKind::Perturbation => {}
        }
        cfg
    }

    pub fn extra_or(&self, key: &str, default: f64) -> f64 {
        self.extra.get(key).copied().unwrap_or(default)
    }

    /// Stream for role `role`; trials take substreams of it.
    pub fn stream(&self, role: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed, role)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::BadShape("trials must be positive".into()));
        }
        let need_m = !matches!(self.name, ExperimentKind::Perturbation);
        if need_m && self.m_values.is_empty() {
            return Err(Error::BadShape("m_values is empty".into()));
        }
        let check_m = |ok: &dyn Fn(usize) -> bool, what: &str| -> Result<()> {
            match self.m_values.iter().find(|&&m| !ok(m)) {
                Some(m) => Err(Error::BadShape(format!("m={m} violates {what}"))),
                None => Ok(()),
            }
        };
        match self.name {
            ExperimentKind::Fig1 => {
                if self.d == 0 {
                    return Err(Error::BadShape("d must be positive".into()));
                }
                check_m(&|m| self.d < m, "d < m")
            }
            ExperimentKind::Lemma1 | ExperimentKind::Bartlett => {
                if self.d == 0 || self.d >= self.n {
                    return Err(Error::BadShape(format!("need 0 < d < n, got d={}, n={}", self.d, self.n)));
                }
                check_m(&|m| self.d < m && m < self.n, "d < m < n")
            }
            ExperimentKind::Theorem2 => {
                if self.k == 0 || 2 * self.k > self.n {
                    return Err(Error::BadShape(format!("need 0 < 2k <= n, got k={}, n={}", self.k, self.n)));
                }
                check_m(&|m| 2 * self.k <= m && m < self.n, "2k <= m < n")
            }
            ExperimentKind::Perturbation => {
                if self.d < 2 || self.d > self.k || self.k >= self.n {
                    return Err(Error::BadShape(format!(
                        "need 2 <= d <= k < n, got d={}, k={}, n={}",
                        self.d, self.k, self.n
                    )));
                }
                Ok(())
            }
        }
    }
}
