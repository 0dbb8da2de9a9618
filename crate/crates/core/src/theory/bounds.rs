//! Concentration tails, sufficient measurement counts and covering sizes.
//!
//! The constants `C` and `C′` are existence-only in the underlying analysis;
//! callers supply them. [`DEFAULT_C`] and [`DEFAULT_C_PRIME`] are
//! demonstration values, not derived ones.

use std::f64::consts::E;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_C_PRIME: f64 = 1.0;

/// `2 exp(−ε² / (4 Σ_{p=1}^{d} [1/(m−p+1) + C/(m−p+1)²]))`.
pub fn lemma1_tail(eps: f64, m: usize, d: usize, c: f64) -> Result<f64> {
    if d == 0 || d >= m {
        return Err(Error::BadShape(format!("need 0 < d < m, got d={d}, m={m}")));
    }
    if !(eps > 0.0) || !(c >= 0.0) || !eps.is_finite() || !c.is_finite() {
        return Err(Error::Domain(format!("need eps > 0 and C >= 0, got eps={eps}, C={c}")));
    }
    let denom: f64 = (1..=d)
        .map(|p| {
            let r = (m - p + 1) as f64;
            1.0 / r + c / (r * r)
        })
        .sum();
    Ok(2.0 * (-eps * eps / (4.0 * denom)).exp())
}

/// Inputs of the main measurement bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub l: u64,
    pub k: usize,
    pub d: usize,
    pub eps: f64,
    pub t: f64,
    pub c_s: f64,
    pub c: f64,
    pub c_prime: f64,
}

impl BoundParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(l: u64, k: usize, d: usize, eps: f64, t: f64, c_s: f64, c: f64, c_prime: f64) -> Result<Self> {
        if l == 0 || k == 0 || d == 0 || d > k {
            return Err(Error::Domain(format!("need L >= 1 and 1 <= d <= k, got L={l}, k={k}, d={d}")));
        }
        check_positive("eps", eps)?;
        check_positive("t", t)?;
        check_positive("C", c)?;
        check_positive("C'", c_prime)?;
        if !(c_s > 0.0 && c_s < 1.0) {
            return Err(Error::Domain(format!("C_s must lie in (0, 1), got {c_s}")));
        }
        Ok(Self { l, k, d, eps, t, c_s, c, c_prime })
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

// Shared prefactor 4(1+C′)²(1+C) and the ceiling term.
fn prefactor(c: f64, c_prime: f64) -> f64 {
    let cp1 = 1.0 + c_prime;
    4.0 * cp1 * cp1 * (1.0 + c)
}

fn ceil_term(eps: f64, c_prime: f64) -> f64 {
    (3.0 * (1.0 + c_prime) / eps).ceil()
}

/// Sufficient number of rows for a volume-based stable embedding of `L`
/// subspaces:
/// `4(1+C′)²(1+C)·d/ε² · [ln 2L + d(3k/2 − 1) ln(ed) + dk ln⌈3(1+C′)/ε⌉ + t] + d − 1`.
pub fn measurement_bound_theorem1(p: &BoundParams) -> f64 {
    let a = prefactor(p.c, p.c_prime);
    let (d, k) = (p.d as f64, p.k as f64);
    let bracket = (2.0 * p.l as f64).ln()
        + d * (1.5 * k - 1.0) * (E * d).ln()
        + d * k * ceil_term(p.eps, p.c_prime).ln()
        + p.t;
    a * d / (p.eps * p.eps) * bracket + (d - 1.0)
}

/// The `d = 1` case written out on its own, for length-preserving embeddings.
///
/// Evaluates in the same operation order as [`measurement_bound_theorem1`],
/// so the two agree bit for bit at `d = 1`.
pub fn measurement_bound_length(l: u64, k: usize, eps: f64, t: f64, c: f64, c_prime: f64) -> f64 {
    let a = prefactor(c, c_prime);
    let k = k as f64;
    let bracket = (2.0 * l as f64).ln() + (1.5 * k - 1.0) * E.ln() + k * ceil_term(eps, c_prime).ln() + t;
    a / (eps * eps) * bracket
}

/// Sufficient rows for preserving all pairwise sine products among `L`
/// subspaces, with `l_bar = L(L−1)/2` supplied by the caller:
/// `8(1+C′)²(1+C)k/ε² · [ln 2L̄ + 2k(3k−1) ln(2ek) + 4k² ln⌈3(1+C′)/ε⌉ + ln 2k + t] + 2k − 1`.
pub fn measurement_bound_corollary1(l_bar: u64, k: usize, eps: f64, t: f64, c: f64, c_prime: f64) -> Result<f64> {
    if l_bar == 0 || k == 0 {
        return Err(Error::Domain(format!("need L_bar >= 1 and k >= 1, got {l_bar}, {k}")));
    }
    check_positive("eps", eps)?;
    check_positive("t", t)?;
    check_positive("C", c)?;
    check_positive("C'", c_prime)?;
    let a = prefactor(c, c_prime);
    let k = k as f64;
    let bracket = (2.0 * l_bar as f64).ln()
        + 2.0 * k * (3.0 * k - 1.0) * (2.0 * E * k).ln()
        + 4.0 * k * k * ceil_term(eps, c_prime).ln()
        + (2.0 * k).ln()
        + t;
    Ok(2.0 * a * k / (eps * eps) * bracket + (2.0 * k - 1.0))
}

/// Classical stable-embedding row count for a union of `L` subspaces of
/// dimension `k`: `(2/(cδ)) (ln 2L + k ln(12/δ) + t)`.
pub fn measurement_bound_davies(l: u64, k: usize, delta: f64, t: f64, c: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if l == 0 || k == 0 {
        return Err(Error::Domain(format!("need L >= 1 and k >= 1, got {l}, {k}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
    }
    check_positive("c", c)?;
    Ok(2.0 / (c * delta) * ((2.0 * l as f64).ln() + k as f64 * (12.0 / delta).ln() + t))
}

/// [`measurement_bound_davies`] over all `L(L−1)/2` pairwise sums.
pub fn measurement_bound_davies_pairwise(l: u64, k: usize, delta: f64, t: f64, c: f64) -> Result<f64> {
    if l < 2 {
        return Err(Error::Domain(format!("pairwise bound needs L >= 2, got {l}")));
    }
    measurement_bound_davies(l * (l - 1) / 2, k, delta, t, c)
}

/// `ln C(⌊(3/δ₀)^k⌋, d)`, the log of the covering-set size.
pub fn log_covering_cardinality(delta0: f64, k: usize, d: usize) -> Result<f64> {
    if !(delta0 > 0.0 && delta0 <= 3.0) {
        return Err(Error::Domain(format!("delta0 must lie in (0, 3], got {delta0}")));
    }
    if k == 0 || d == 0 {
        return Err(Error::Domain(format!("need k >= 1 and d >= 1, got k={k}, d={d}")));
    }
    let n = (3.0 / delta0).powi(k as i32).floor();
    if !n.is_finite() {
        return Err(Error::Domain("ball count overflows f64".into()));
    }
    let df = d as f64;
    if df > n {
        return Err(Error::Domain(format!("C({n}, {d}) is zero")));
    }
    let r = df.min(n - df);
    if r < 10_000.0 {
        // Σ_{i<r} ln((n−i)/(i+1)), with ln(n−i) = ln n + ln(1 − i/n) so that
        // huge n loses nothing to cancellation.
        let ln_n = n.ln();
        let r = r as u64;
        let mut total = 0.0;
        for i in 0..r {
            let i = i as f64;
            total += ln_n + (-i / n).ln_1p() - (i + 1.0).ln();
        }
        Ok(total)
    } else {
        Ok(ln_gamma(n + 1.0) - ln_gamma(df + 1.0) - ln_gamma(n - df + 1.0))
    }
}

/// Which growth term [`order_estimate`] reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderMode {
    /// `L` arbitrary subspaces.
    Theorem1 { l: f64 },
    /// All `k`-sparse coordinate subspaces of `R^n`.
    Sparse { n: f64 },
}

/// Growth of the row count with constants dropped:
/// `d ln L + d²k ln(ed)`, or `dk ln(n/k) + d²k ln(ed)` for sparse signals.
pub fn order_estimate(d: usize, k: usize, mode: OrderMode) -> f64 {
    let (d, k) = (d as f64, k as f64);
    let shared = d * d * k * (E * d).ln();
    match mode {
        OrderMode::Theorem1 { l } => d * l.ln() + shared,
        OrderMode::Sparse { n } => d * k * (n / k).ln() + shared,
    }
}

/// True iff every log volume ratio lies in `[A − ε, A + ε]`.
pub fn check_volume_embedding(log_ratios: &[f64], a: f64, eps: f64) -> bool {
    log_ratios.iter().all(|r| (r - a).abs() <= eps)
}
