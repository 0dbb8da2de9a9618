//! Digamma and the two concentration centers built from it.

use std::f64::consts::LN_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const ASYMPTOTIC_THRESHOLD: f64 = 10.0;

// B_{2n} / (2n) for n = 1..6.
const TAIL: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
];

/// ψ(x) for x > 0.
///
/// Arguments below 10 are shifted up with ψ(x) = ψ(x+1) − 1/x; the shifted
/// value goes through `ln x − 1/(2x) − Σ B_{2n}/(2n x^{2n})`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma needs x > 0, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut poly = 0.0;
    for c in TAIL.iter().rev() {
        poly = poly * inv2 + c;
    }
    Ok(x.ln() - 0.5 / x - poly * inv2 - shift)
}

// Prefix sums of ψ(j/2), j = 1..=HALF_TABLE, in double-double so that any
// range sum is correctly rounded and costs O(1).
const HALF_TABLE: usize = 8192;

struct HalfPrefix {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn half_prefix() -> &'static HalfPrefix {
    static PREFIX: OnceLock<HalfPrefix> = OnceLock::new();
    PREFIX.get_or_init(|| {
        let mut hi = Vec::with_capacity(HALF_TABLE + 1);
        let mut lo = Vec::with_capacity(HALF_TABLE + 1);
        let (mut h, mut l) = (0.0, 0.0);
        hi.push(h);
        lo.push(l);
        for j in 1..=HALF_TABLE {
            let (s, e) = two_sum(h, digamma(j as f64 / 2.0).expect("positive"));
            (h, l) = two_sum(s, l + e);
            hi.push(h);
            lo.push(l);
        }
        HalfPrefix { hi, lo }
    })
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `Σ_{j=a}^{b} ψ(j/2)` for `1 ≤ a` as an unevaluated sum `hi + lo`; zero
/// when `a > b`.
fn half_digamma_range(a: usize, b: usize) -> (f64, f64) {
    if a > b {
        return (0.0, 0.0);
    }
    if b <= HALF_TABLE {
        let p = half_prefix();
        let (s, e) = two_sum(p.hi[b], -p.hi[a - 1]);
        (s, e + (p.lo[b] - p.lo[a - 1]))
    } else {
        (compensated_sum((a..=b).map(|j| digamma(j as f64 / 2.0).expect("positive"))), 0.0)
    }
}

/// The raw digamma sum `½ Σ_{p=1}^{d} (ψ((m−p+1)/2) + ln 2 − ln m)`.
///
/// Defined for `d ≤ m`; [`volume_ratio_center`] is the validated entry point
/// and rejects `d = m`, where no full-rank compression exists.
pub fn volume_ratio_center_sum(m: usize, d: usize) -> Result<f64> {
    if d > m {
        return Err(Error::BadShape(format!("need d <= m, got d={d}, m={m}")));
    }
    if d == 0 {
        return Ok(0.0);
    }
    let log_scale = LN_2 - (m as f64).ln();
    let (hi, lo) = half_digamma_range(m - d + 1, m);
    // d·log_scale is exact as p + pe.
    let p = d as f64 * log_scale;
    let pe = (d as f64).mul_add(log_scale, -p);
    let (s, e) = two_sum(hi, p);
    Ok(0.5 * (s + (e + lo + pe)))
}

/// Center of `log(vol_d(ΦS)/vol_d(S))` for `Φ` with `m` rows.
pub fn volume_ratio_center(m: usize, d: usize) -> Result<f64> {
    if d >= m {
        return Err(Error::BadShape(format!("need d < m, got d={d}, m={m}")));
    }
    volume_ratio_center_sum(m, d)
}

/// Large-`m` form `½ Σ_p (ln(m−p+1) − ln m − 1/(m−p+1))`.
pub fn volume_ratio_center_asymptotic(m: usize, d: usize) -> Result<f64> {
    if d >= m {
        return Err(Error::BadShape(format!("need d < m, got d={d}, m={m}")));
    }
    let ln_m = (m as f64).ln();
    let terms = (1..=d).map(|p| {
        let r = (m - p + 1) as f64;
        r.ln() - ln_m - 1.0 / r
    });
    Ok(0.5 * compensated_sum(terms))
}

/// Center of the log sine-product ratio for `k`-dimensional subspaces:
/// `½ Σ_{p=1}^{k} (ψ((m−p−k+1)/2) − ψ((m−p+1)/2))`.
pub fn sine_product_center(m: usize, k: usize) -> Result<f64> {
    if 2 * k > m {
        return Err(Error::BadShape(format!("need 2k <= m, got k={k}, m={m}")));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let (lh, ll) = half_digamma_range(m - 2 * k + 1, m - k);
    let (uh, ul) = half_digamma_range(m - k + 1, m);
    let (s, e) = two_sum(lh, -uh);
    Ok(0.5 * (s + (e + (ll - ul))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // High-precision reference values.
    const ORACLE: [(f64, f64); 11] = [
        (1.0, -0.57721566490153286061),
        (0.5, -1.9635100260214234794),
        (0.001, -1000.5755719318103005),
        (0.01, -100.5608854578686745),
        (0.37, -2.7953014108905639616),
        (2.5, 0.70315664064524318723),
        (9.99, 2.2507003728312010995),
        (10.0, 2.2517525890667211076),
        (123.456, 4.8118293238289853873),
        (1e5, 11.512920464961895087),
        (1e6, 13.815510057964190771),
    ];

    #[test]
    fn matches_reference_values() {
        for (x, want) in ORACLE {
            assert_abs_diff_eq!(digamma(x).unwrap(), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn recurrence_at_small_points() {
        for x in [0.5, 1.0, 10.0, 100.0] {
            let r = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            assert!(r.abs() <= 1e-12, "x={x} residual {r}");
        }
    }

    #[test]
    fn domain() {
        assert!(matches!(digamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(digamma(-1.5), Err(Error::Domain(_))));
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn center_reference_values() {
        assert_eq!(volume_ratio_center(10, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(volume_ratio_center(2, 1).unwrap(), -0.2886078324507664303, epsilon = 1e-14);
        assert_abs_diff_eq!(volume_ratio_center(500, 10).unwrap(), -0.05538567648682830262, epsilon = 1e-13);
        assert_abs_diff_eq!(volume_ratio_center(200, 10).unwrap(), -0.13994927942347055746, epsilon = 1e-13);
        assert_abs_diff_eq!(sine_product_center(500, 10).unwrap(), -0.10215197439913856999, epsilon = 1e-13);
        assert_abs_diff_eq!(sine_product_center(100, 5).unwrap(), -0.13233073038204802024, epsilon = 1e-13);
        assert_abs_diff_eq!(sine_product_center(200, 5).unwrap(), -0.064273724249770873435, epsilon = 1e-13);
        assert_eq!(sine_product_center(7, 0).unwrap(), 0.0);
    }

    #[test]
    fn center_shapes() {
        assert!(matches!(volume_ratio_center(10, 10), Err(Error::BadShape(_))));
        assert!(matches!(volume_ratio_center_asymptotic(3, 4), Err(Error::BadShape(_))));
        assert!(matches!(sine_product_center(9, 5), Err(Error::BadShape(_))));
        assert!(sine_product_center(10, 5).is_ok());
        assert!(volume_ratio_center_sum(10, 10).is_ok());
        assert!(volume_ratio_center_sum(10, 11).is_err());
    }

    #[test]
    fn asymptotic_form_is_close() {
        let exact = volume_ratio_center(5000, 10).unwrap();
        let approx = volume_ratio_center_asymptotic(5000, 10).unwrap();
        assert!((exact - approx).abs() < 1e-5);
        let mut prev = volume_ratio_center_asymptotic(100, 5).unwrap();
        for m in [200, 400, 800, 1600] {
            let v = volume_ratio_center_asymptotic(m, 5).unwrap();
            assert!(v > prev && v < 0.0);
            prev = v;
        }
        assert!(volume_ratio_center_asymptotic(400, 20).unwrap() < volume_ratio_center_asymptotic(400, 10).unwrap());
    }

    #[test]
    fn identity_at_full_width() {
        // 2k = m: the volume center is undefined but the digamma sums still
        // telescope.
        for m in [2usize, 10, 64, 500] {
            let k = m / 2;
            let lhs = sine_product_center(m, k).unwrap();
            let rhs = volume_ratio_center_sum(m, 2 * k).unwrap() - 2.0 * volume_ratio_center(m, k).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12, "m={m}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn table_and_direct_sums_agree() {
        for (a, b) in [(1, 1), (1, 40), (300, 8192), (8000, 8192), (4097, 4200)] {
            let direct = compensated_sum((a..=b).map(|j| digamma(j as f64 / 2.0).unwrap()));
            let (hi, lo) = half_digamma_range(a, b);
            let table = hi + lo;
            assert!((direct - table).abs() <= 4.0 * f64::EPSILON * direct.abs().max(1.0), "{a}..{b}");
        }
        assert_eq!(half_digamma_range(5, 4), (0.0, 0.0));
        // Beyond the table the loop takes over.
        assert!(volume_ratio_center(10_000, 30).unwrap() < 0.0);
    }

    #[test]
    fn sine_center_at_500_is_negative() {
        assert!(sine_product_center(500, 10).unwrap() < 0.0);
    }

    proptest! {
        #[test]
        fn recurrence_holds(logx in -2.0f64..5.0) {
            let x = 10f64.powf(logx);
            let r = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            prop_assert!(r.abs() <= 1e-12);
        }

        #[test]
        fn center_identity(m in 2usize..2000, frac in 0.0f64..1.0) {
            let k = ((m / 2) as f64 * frac) as usize;
            prop_assume!(2 * k < m);
            let lhs = sine_product_center(m, k).unwrap();
            let rhs = volume_ratio_center(m, 2 * k).unwrap() - 2.0 * volume_ratio_center(m, k).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn centers_are_nonpositive(m in 2usize..3000, d in 1usize..50) {
            prop_assume!(d < m);
            prop_assert!(volume_ratio_center(m, d).unwrap() < 0.0);
        }
    }
}
