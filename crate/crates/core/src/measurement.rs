//! Seeded random generation: Gaussian measurement matrices, random
//! subspaces, subspace pairs with prescribed principal angles, and the
//! Bartlett log-determinant sampler.
//!
//! Every sampler is a pure function of its [`SeedSpec`]; there is no shared
//! RNG state, so trials can run in any order or on any number of threads.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::subspace::{column_normalize, Subspace};

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    /// ChaCha12 keyed by the master seed, positioned on its own stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// A child stream; the child's key is a hash of this spec.
    pub fn substream(&self, index: u64) -> SeedSpec {
        SeedSpec {
            master_seed: splitmix64(self.master_seed ^ splitmix64(self.stream_index.wrapping_add(0x5eed))),
            stream_index: index,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Matrix of i.i.d. standard normals, filled column by column.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DMatrix::from_vec(rows, cols, data)
}

/// An `M×N` matrix with i.i.d. `N(0, 1/M)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    matrix: DenseMatrix,
    seed: SeedSpec,
}

impl MeasurementMatrix {
    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn seed(&self) -> SeedSpec {
        self.seed
    }
}

pub fn sample_measurement(m: usize, n: usize, seed: SeedSpec) -> Result<MeasurementMatrix> {
    if m == 0 || m >= n {
        return Err(Error::BadShape(format!("need 0 < M < N, got M={m}, N={n}")));
    }
    let mut rng = seed.rng();
    let scale = 1.0 / (m as f64).sqrt();
    let matrix = gaussian_matrix(&mut rng, m, n) * scale;
    Ok(MeasurementMatrix { matrix: DenseMatrix::from(matrix), seed })
}

/// `Φ·S`. Rank is not checked here; volume routines reject rank loss.
pub fn compress(phi: &MeasurementMatrix, s: &DenseMatrix) -> Result<DenseMatrix> {
    if phi.n() != s.rows() {
        return Err(Error::DimensionMismatch(format!(
            "Φ has {} columns, S has {} rows",
            phi.n(),
            s.rows()
        )));
    }
    Ok(DenseMatrix::from(phi.matrix.as_inner() * s.as_inner()))
}

/// Subspace with an i.i.d. Gaussian basis, optionally column-normalized.
pub fn random_subspace(n: usize, k: usize, unit_norm: bool, seed: SeedSpec) -> Result<Subspace> {
    if k == 0 || k >= n {
        return Err(Error::BadShape(format!("need 0 < k < N, got k={k}, N={n}")));
    }
    let basis = DenseMatrix::from(gaussian_matrix(&mut seed.rng(), n, k));
    if unit_norm {
        Subspace::with_unit_norm(column_normalize(&basis)?)
    } else {
        Subspace::new(basis)
    }
}

/// Haar-distributed orthonormal `n×k` frame: QR of a Gaussian matrix with
/// the signs of `R`'s diagonal folded into `Q`.
pub fn random_orthonormal_frame<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, k).qr();
    let r_diag = qr.r().diagonal();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r_diag[j] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// Target principal angles, each in `(0, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnglePrescription {
    angles: Vec<f64>,
}

impl AnglePrescription {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::BadAngles("empty prescription".into()));
        }
        if let Some(a) = angles.iter().find(|a| !(**a > 0.0 && **a <= FRAC_PI_2)) {
            return Err(Error::BadAngles(format!("angle {a} outside (0, π/2]")));
        }
        Ok(Self { angles })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn log_product_sines(&self) -> f64 {
        self.angles.iter().map(|a| a.sin().ln()).sum()
    }
}

/// Builds `(X, Y)` with the prescribed principal angles.
///
/// The canonical pair `X₀ = [e_1..e_k]`, `Y₀ = [cos θ_i e_i + sin θ_i e_{k+i}]`
/// is carried into `R^n` by one shared random orthonormal `n×2k` frame, which
/// costs `O(n k²)` rather than a full `n×n` rotation. Both bases come out
/// orthonormal.
pub fn subspace_pair_with_angles(
    n: usize,
    k: usize,
    prescription: &AnglePrescription,
    seed: SeedSpec,
) -> Result<(Subspace, Subspace)> {
    if prescription.angles.len() != k {
        return Err(Error::BadAngles(format!(
            "{} angles for k={k}",
            prescription.angles.len()
        )));
    }
    if k == 0 || n < 2 * k {
        return Err(Error::BadShape(format!("need n >= 2k, got n={n}, k={k}")));
    }
    let frame = random_orthonormal_frame(&mut seed.rng(), n, 2 * k);
    let x = frame.columns(0, k).into_owned();
    let mut y = DMatrix::zeros(n, k);
    for (i, &theta) in prescription.angles.iter().enumerate() {
        let (s, c) = theta.sin_cos();
        y.set_column(i, &(frame.column(i) * c + frame.column(k + i) * s));
    }
    let x = Subspace::with_unit_norm(DenseMatrix::from(x))?;
    let y = Subspace::new(DenseMatrix::from(y))?;
    Ok((x, y))
}

/// One draw of `Σ_{p=1..d} [log χ²_{m−p+1} − log m]`, which has the exact law
/// of `log det(Φ̂ᵀΦ̂)` for an `m×d` matrix with `N(0, 1/m)` entries.
pub fn bartlett_logdet_sample(m: usize, d: usize, seed: SeedSpec) -> Result<f64> {
    bartlett_logdet_sample_with(&mut seed.rng(), m, d)
}

pub fn bartlett_logdet_sample_with<R: Rng + ?Sized>(rng: &mut R, m: usize, d: usize) -> Result<f64> {
    if m == 0 || d >= m {
        return Err(Error::BadShape(format!("need 0 <= d < m, got d={d}, m={m}")));
    }
    let log_m = (m as f64).ln();
    let mut total = 0.0;
    for p in 1..=d {
        // χ²_ν = Gamma(ν/2, scale 2)
        let dof = (m - p + 1) as f64;
        let chi2: f64 = rng.sample(Gamma::new(dof / 2.0, 2.0).expect("positive shape"));
        total += chi2.ln() - log_m;
    }
    Ok(total)
}
