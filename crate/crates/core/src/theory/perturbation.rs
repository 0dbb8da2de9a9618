//! Volume envelopes for column-wise perturbations of a well-conditioned basis.
//!
//! `S` has unit-norm columns and `vol_d(S) > C_s`; `Q = S + E` with every
//! column of `E` of norm at most `δ₀`. Then
//! `vol_d(Q)·exp(−d^{3/2}δ₀/C₁) ≤ vol_d(S) ≤ vol_d(Q)·exp(d^{3/2}δ₀/C₂)`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationEnvelope {
    pub c1: f64,
    pub c2: f64,
    pub delta0: f64,
    pub d: usize,
    pub c_phi: f64,
}

/// `C_s·(d/(d−1))^{−1/(2(d−1))}`, a lower bound on the smallest singular
/// value of any unit-column `S` with `vol_d(S) > C_s`.
pub fn smallest_singular_floor(c_s: f64, d: usize) -> f64 {
    let d = d as f64;
    c_s * (d / (d - 1.0)).powf(-1.0 / (2.0 * (d - 1.0)))
}

/// `1 − √(1 − C_s²)`: no two columns of such an `S` can be closer.
pub fn min_column_distance_floor(c_s: f64) -> f64 {
    1.0 - (1.0 - c_s * c_s).sqrt()
}

pub fn perturbation_envelope(
    c_s: f64,
    d: usize,
    delta_s2: f64,
    c_phi: f64,
    delta0: f64,
) -> Result<PerturbationEnvelope> {
    if !(c_s > 0.0 && c_s < 1.0) {
        return Err(Error::Domain(format!("C_s must lie in (0, 1), got {c_s}")));
    }
    if d < 2 {
        return Err(Error::Domain(format!("envelope needs d >= 2, got {d}")));
    }
    if !(c_phi > 0.0) || !c_phi.is_finite() {
        return Err(Error::Domain(format!("C_phi must be positive, got {c_phi}")));
    }
    let c1 = smallest_singular_floor(c_s, d);
    let limit = c1 / (d as f64).sqrt();
    if !(delta_s2 > 0.0 && delta_s2 < limit) {
        return Err(Error::Domain(format!("delta_s2 must lie in (0, {limit}), got {delta_s2}")));
    }
    if !(delta0 >= 0.0 && delta0 <= delta_s2) {
        return Err(Error::Domain(format!("delta0 must lie in [0, {delta_s2}], got {delta0}")));
    }
    let c2 = c1 - (d as f64).sqrt() * delta_s2;
    Ok(PerturbationEnvelope { c1, c2, delta0, d, c_phi })
}

impl PerturbationEnvelope {
    fn scale(&self) -> f64 {
        (self.d as f64).powf(1.5) * self.delta0
    }

    /// `(exp(−d^{3/2}δ₀/C₁), exp(d^{3/2}δ₀/C₂))`, bracketing `vol(S)/vol(Q)`.
    pub fn volume_factors(&self) -> (f64, f64) {
        let s = self.scale();
        ((-s / self.c1).exp(), (s / self.c2).exp())
    }

    /// The same bracket for `vol(ΦS)/vol(ΦQ)`, with `C_Φ` bounding `‖Φ‖₂`.
    pub fn compressed_volume_factors(&self) -> (f64, f64) {
        let s = self.scale() * self.c_phi;
        ((-s / self.c1).exp(), (s / self.c2).exp())
    }

    /// Interval that must contain `vol(Q)` given `vol(S)`.
    pub fn perturbed_volume_interval(&self, vol_s: f64) -> (f64, f64) {
        let (lo, hi) = self.volume_factors();
        (vol_s / hi, vol_s / lo)
    }

    /// `max{C_Φ/C₁ + 1/C₂, C_Φ/C₂ + 1/C₁}`.
    pub fn c_prime(&self) -> f64 {
        (self.c_phi / self.c1 + 1.0 / self.c2).max(self.c_phi / self.c2 + 1.0 / self.c1)
    }

    /// Half-width `d^{3/2}C′δ₀` of the band around the log-ratio of the
    /// unperturbed basis.
    pub fn log_ratio_slack(&self) -> f64 {
        self.scale() * self.c_prime()
    }
}
