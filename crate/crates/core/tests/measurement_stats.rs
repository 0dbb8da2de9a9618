use grassmann_embed::experiments::{ks_two_sample, mean_and_variance};
use grassmann_embed::measurement::{compress, gaussian_matrix, sample_measurement, SeedSpec};
use grassmann_embed::subspace::log_volume;
use grassmann_embed::DenseMatrix;

fn log_ratio_samples(s: &DenseMatrix, m: usize, trials: usize, master: u64) -> Vec<f64> {
    let base = log_volume(s).unwrap().log_value;
    let root = SeedSpec::new(master, 0);
    (0..trials as u64)
        .map(|t| {
            let phi = sample_measurement(m, s.rows(), root.substream(t)).unwrap();
            log_volume(&compress(&phi, s).unwrap()).unwrap().log_value - base
        })
        .collect()
}

#[test]
fn log_ratio_law_does_not_depend_on_the_subspace() {
    let (n, m, d, trials) = (80, 50, 5, 20_000);
    let a = DenseMatrix::from(gaussian_matrix(&mut SeedSpec::new(11, 0).rng(), n, d));
    // A badly conditioned basis of an unrelated subspace.
    let mut b = gaussian_matrix(&mut SeedSpec::new(12, 0).rng(), n, d);
    let first = b.column(0).clone_owned();
    b.column_mut(1).axpy(30.0, &first, 0.05);
    let b = DenseMatrix::from(b);

    let xs = log_ratio_samples(&a, m, trials, 1001);
    let ys = log_ratio_samples(&b, m, trials, 2002);
    let ks = ks_two_sample(&xs, &ys).unwrap();
    assert!(ks.p_value > 0.01, "KS D={} p={}", ks.statistic, ks.p_value);
}

#[test]
fn compression_preserves_squared_norm_in_mean() {
    let (n, m, trials) = (120, 30, 20_000);
    let root = SeedSpec::new(77, 3);
    for (i, scale) in [1.0, 0.01, 250.0].into_iter().enumerate() {
        let s = gaussian_matrix(&mut SeedSpec::new(78, i as u64).rng(), n, 1) * scale;
        let norm2 = s.norm_squared();
        let s = DenseMatrix::from(s);
        let ratios: Vec<f64> = (0..trials as u64)
            .map(|t| {
                let phi = sample_measurement(m, n, root.substream(t)).unwrap();
                compress(&phi, &s).unwrap().as_inner().norm_squared() / norm2
            })
            .collect();
        let (mean, var) = mean_and_variance(&ratios).unwrap();
        let se = (var.unwrap() / trials as f64).sqrt();
        assert!((mean - 1.0).abs() <= 4.0 * se, "scale {scale}: mean {mean}, se {se}");
    }
}

#[test]
fn same_seed_same_matrix() {
    let seed = SeedSpec::new(5, 9);
    let a = sample_measurement(20, 60, seed).unwrap();
    let b = sample_measurement(20, 60, seed).unwrap();
    assert_eq!(a.matrix(), b.matrix());
    let c = sample_measurement(20, 60, seed.substream(0)).unwrap();
    assert_ne!(a.matrix(), c.matrix());
}
