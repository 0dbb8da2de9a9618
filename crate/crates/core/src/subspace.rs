//! Deterministic geometry of parallelotopes and subspaces.
//!
//! Volumes are kept in the natural-log domain: products of many singular
//! values or sines underflow long before the dimensions get interesting.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Cosine above which principal angles are recovered from sines instead.
const SINE_SWITCH_COSINE: f64 = 0.99;

/// Relative rank cutoff `max(rows, cols) · ε · σ_max`.
pub fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Singular values in descending order. Empty for a zero-column matrix.
pub fn singular_values(s: &DenseMatrix) -> Vec<f64> {
    if s.cols() == 0 || s.rows() == 0 {
        return Vec::new();
    }
    s.as_inner().singular_values().iter().copied().collect()
}

fn check_full_rank(rows: usize, cols: usize, sv: &[f64]) -> Result<()> {
    let (Some(&max), Some(&min)) = (sv.first(), sv.last()) else {
        return Ok(());
    };
    let tolerance = rank_tolerance(rows, cols, max);
    if min <= tolerance {
        return Err(Error::RankDeficient { smallest: min, tolerance });
    }
    Ok(())
}

/// Natural log of a `dim`-dimensional parallelotope volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogVolume {
    pub log_value: f64,
    pub dim: usize,
}

impl LogVolume {
    pub fn volume(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `Σ log σ_i` over the singular values of a full-column-rank matrix.
pub fn log_volume(s: &DenseMatrix) -> Result<LogVolume> {
    if s.cols() > s.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} columns exceed {} rows",
            s.cols(),
            s.rows()
        )));
    }
    let sv = singular_values(s);
    check_full_rank(s.rows(), s.cols(), &sv)?;
    Ok(LogVolume { log_value: sv.iter().map(|v| v.ln()).sum(), dim: s.cols() })
}

/// `½ log det(SᵀS)` through an `LDLᵀ` factor of the Gram matrix.
///
/// Both the Gram matrix and the factorization are carried in double-double
/// arithmetic, since forming `SᵀS` squares the condition number. Kept as an
/// independent cross-check of [`log_volume`].
pub fn log_volume_gram(s: &DenseMatrix) -> Result<f64> {
    let a = s.as_inner();
    let d = a.ncols();
    let mut g = vec![Dd::ZERO; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut acc = Dd::ZERO;
            for r in 0..a.nrows() {
                acc = acc.add(Dd::prod(a[(r, i)], a[(r, j)]));
            }
            g[i * d + j] = acc;
        }
    }
    // In place: strict lower triangle holds L, the diagonal holds D.
    let mut log_det = 0.0;
    for j in 0..d {
        let mut dj = g[j * d + j];
        for k in 0..j {
            dj = dj.sub(g[j * d + k].mul(g[j * d + k]).mul(g[k * d + k]));
        }
        if !(dj.hi > 0.0) {
            return Err(Error::RankDeficient { smallest: dj.hi.max(0.0).sqrt(), tolerance: 0.0 });
        }
        g[j * d + j] = dj;
        log_det += dj.hi.ln() + dj.lo / dj.hi;
        for i in j + 1..d {
            let mut v = g[i * d + j];
            for k in 0..j {
                v = v.sub(g[i * d + k].mul(g[j * d + k]).mul(g[k * d + k]));
            }
            g[i * d + j] = v.div(dj);
        }
    }
    Ok(0.5 * log_det)
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn quick(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd { hi: p, lo: a.mul_add(b, -p) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let u = Dd::quick(s.hi, s.lo + t.hi);
        Dd::quick(u.hi, u.lo + t.lo)
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::prod(self.hi, o.hi);
        Dd::quick(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd { hi: q1, lo: 0.0 }));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd { hi: q2, lo: 0.0 }));
        let q3 = r.hi / o.hi;
        Dd::quick(q1, q2).add(Dd { hi: q3, lo: 0.0 })
    }
}

/// A point of Gr(k, N) given by a full-column-rank basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DenseMatrix,
    unit_norm: bool,
}

impl Subspace {
    pub fn new(basis: DenseMatrix) -> Result<Self> {
        let (n, k) = (basis.rows(), basis.cols());
        if k == 0 || k >= n {
            return Err(Error::BadShape(format!("need 0 < k < N, got k={k}, N={n}")));
        }
        check_full_rank(n, k, &singular_values(&basis))?;
        Ok(Self { basis, unit_norm: false })
    }

    /// Like [`Subspace::new`] but also requires every column to have unit norm.
    pub fn with_unit_norm(basis: DenseMatrix) -> Result<Self> {
        let mut sub = Self::new(basis)?;
        for (j, col) in sub.basis.as_inner().column_iter().enumerate() {
            if (col.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("column {j} is not unit norm")));
            }
        }
        sub.unit_norm = true;
        Ok(sub)
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn is_unit_norm(&self) -> bool {
        self.unit_norm
    }

    /// Orthonormal basis of the span by Gram-Schmidt with one full
    /// reorthogonalization pass. Columns that are already orthonormal come
    /// back unchanged.
    pub fn orthonormal_basis(&self) -> DMatrix<f64> {
        let mut q = self.basis.as_inner().clone();
        for j in 0..q.ncols() {
            let mut v = q.column(j).clone_owned();
            for _ in 0..2 {
                for i in 0..j {
                    let qi = q.column(i);
                    let r = qi.dot(&v);
                    v.axpy(-r, &qi, 1.0);
                }
            }
            let norm = v.norm();
            q.set_column(j, &(v / norm));
        }
        q
    }
}

/// Principal angles in radians, sorted descending, each in `[0, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngleSet {
    angles: Vec<f64>,
}

impl PrincipalAngleSet {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn log_product_sines(&self) -> f64 {
        self.angles.iter().map(|a| a.sin().ln()).sum()
    }
}

fn check_same_shape(x: &Subspace, y: &Subspace) -> Result<()> {
    if x.ambient() != y.ambient() || x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Gr({}, {}) vs Gr({}, {})",
            x.dim(),
            x.ambient(),
            y.dim(),
            y.ambient()
        )));
    }
    Ok(())
}

/// Cosines (descending) and sines (ascending) of the principal angles,
/// paired index by index.
fn cosines_and_sines(x: &Subspace, y: &Subspace) -> (Vec<f64>, Vec<f64>) {
    let qx = x.orthonormal_basis();
    let qy = y.orthonormal_basis();
    let cross = qx.transpose() * &qy;
    let cosines: Vec<f64> = cross.singular_values().iter().copied().collect();
    let residual = &qy - &qx * &cross;
    let mut sines: Vec<f64> = residual.singular_values().iter().copied().collect();
    sines.reverse();
    (cosines, sines)
}

pub fn principal_angles(x: &Subspace, y: &Subspace) -> Result<PrincipalAngleSet> {
    check_same_shape(x, y)?;
    let (cosines, sines) = cosines_and_sines(x, y);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            let theta = if c > SINE_SWITCH_COSINE { s.min(1.0).asin() } else { c.clamp(-1.0, 1.0).acos() };
            theta.clamp(0.0, half_pi)
        })
        .collect();
    angles.sort_by(|a, b| b.total_cmp(a));
    Ok(PrincipalAngleSet { angles })
}

/// `Σ log sin θ_i` for disjoint subspaces.
///
/// Disjointness is certified by full numerical rank of `[X, Y]`; otherwise
/// [`Error::NotDisjoint`].
pub fn log_product_principal_sines(x: &Subspace, y: &Subspace) -> Result<f64> {
    check_same_shape(x, y)?;
    let joined = juxtapose(x.basis(), y.basis())?;
    if joined.cols() > joined.rows() {
        return Err(Error::NotDisjoint);
    }
    check_full_rank(joined.rows(), joined.cols(), &singular_values(&joined))
        .map_err(|_| Error::NotDisjoint)?;
    let (cosines, sines) = cosines_and_sines(x, y);
    Ok(cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            let sine = if c > SINE_SWITCH_COSINE { s } else { ((1.0 - c) * (1.0 + c)).max(0.0).sqrt() };
            sine.min(1.0).ln()
        })
        .sum())
}

/// Column-wise concatenation `[X, Y]`.
pub fn juxtapose(x: &DenseMatrix, y: &DenseMatrix) -> Result<DenseMatrix> {
    if x.rows() != y.rows() {
        return Err(Error::DimensionMismatch(format!("{} rows vs {} rows", x.rows(), y.rows())));
    }
    let (n, kx, ky) = (x.rows(), x.cols(), y.cols());
    let mut out = DMatrix::zeros(n, kx + ky);
    out.columns_mut(0, kx).copy_from(x.as_inner());
    out.columns_mut(kx, ky).copy_from(y.as_inner());
    Ok(DenseMatrix::from(out))
}

/// Scales every column to unit Euclidean norm.
pub fn column_normalize(s: &DenseMatrix) -> Result<DenseMatrix> {
    let mut out = s.as_inner().clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(Error::ZeroColumn(j));
        }
        col /= norm;
    }
    Ok(DenseMatrix::from(out))
}

/// `min_{j≠l} ‖s_j − s_l‖₂`.
pub fn min_pairwise_column_distance(s: &DenseMatrix) -> Result<f64> {
    let d = s.cols();
    if d < 2 {
        return Err(Error::BadShape(format!("need at least 2 columns, got {d}")));
    }
    let a = s.as_inner();
    let mut best = f64::INFINITY;
    for j in 0..d {
        for l in (j + 1)..d {
            best = best.min((a.column(j) - a.column(l)).norm());
        }
    }
    Ok(best)
}

/// Distance from column `j` to the span of the other columns, `‖P⊥ s_j‖₂`.
///
/// Errors with [`Error::RankDeficient`] when the remaining columns are
/// themselves dependent, since the projector is then ill defined.
pub fn residual_norm(s: &DenseMatrix, j: usize) -> Result<f64> {
    if j >= s.cols() {
        return Err(Error::DimensionMismatch(format!("column {j} of {}", s.cols())));
    }
    let target: DVector<f64> = s.as_inner().column(j).into_owned();
    if s.cols() == 1 {
        return Ok(target.norm());
    }
    let rest = s.without_column(j);
    if rest.cols() >= rest.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} remaining columns in {} rows",
            rest.cols(),
            rest.rows()
        )));
    }
    check_full_rank(rest.rows(), rest.cols(), &singular_values(&rest))?;
    let q = rest.into_inner().qr().q();
    // Two passes of Gram-Schmidt against Q.
    let mut r = &target - &q * (q.transpose() * &target);
    r -= &q * (q.transpose() * &r);
    Ok(r.norm())
}
