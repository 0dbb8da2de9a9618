//! Acceptance criteria. Each test writes one PASS/FAIL line straight to the
//! stderr handle, which the test harness does not capture.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use grassmann_embed::experiments::{
    check_fig1_claims, run_bartlett_equivalence, run_fig1_surface, run_lemma1_concentration,
    run_perturbation_check, run_theorem2_scatter, satisfies_volume_floor, ExperimentConfig, ExperimentKind,
};
use grassmann_embed::measurement::{gaussian_matrix, random_subspace, SeedSpec};
use grassmann_embed::subspace::{
    column_normalize, juxtapose, log_product_principal_sines, log_volume, min_pairwise_column_distance,
    residual_norm,
};
use grassmann_embed::theory::{
    digamma, measurement_bound_corollary1, measurement_bound_davies, measurement_bound_davies_pairwise,
    measurement_bound_length, measurement_bound_theorem1, min_column_distance_floor, sine_product_center,
    volume_ratio_center, volume_ratio_center_sum, BoundParams,
};
use grassmann_embed::DenseMatrix;
use rand::Rng;

fn report(id: u32, name: &str, pass: bool, elapsed: Duration, limit: Option<Duration>, detail: &str) {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let verdict = if pass && in_time { "PASS" } else { "FAIL" };
    let budget = limit.map_or(String::new(), |l| format!(" (limit {:.0}s)", l.as_secs_f64()));
    let _ = writeln!(
        std::io::stderr(),
        "acceptance {id:>2} {verdict}: {name}: {detail}; {:.2}s{budget}",
        elapsed.as_secs_f64()
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its time budget: {elapsed:?}");
}

#[test]
fn criterion_01_volume_angle_identity() {
    let start = Instant::now();
    let seeds = SeedSpec::new(101, 0);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let x = random_subspace(60, 5, true, seeds.substream(2 * i)).unwrap();
        let y = random_subspace(60, 5, true, seeds.substream(2 * i + 1)).unwrap();
        let joint = log_volume(&juxtapose(x.basis(), y.basis()).unwrap()).unwrap().log_value;
        let vx = log_volume(x.basis()).unwrap().log_value;
        let vy = log_volume(y.basis()).unwrap().log_value;
        let sines = log_product_principal_sines(&x, &y).unwrap();
        worst = worst.max((joint - vx - vy - sines).abs());
    }
    report(
        1,
        "joint volume equals volumes times sine product",
        worst <= 1e-8,
        start.elapsed(),
        Some(Duration::from_secs(5)),
        &format!("200 pairs, worst residual {worst:.3e} (tol 1e-8)"),
    );
}

#[test]
fn criterion_02_recursion_and_column_floor() {
    let start = Instant::now();
    let (n, d, per_level) = (30, 6, 1000);
    let mut worst = 0.0f64;
    let mut floor_violations = 0;
    for (level, c_s) in [0.2, 0.4, 0.6].into_iter().enumerate() {
        let mut rng = SeedSpec::new(202, level as u64).rng();
        let mut accepted = 0;
        while accepted < per_level {
            let s = column_normalize(&DenseMatrix::from(gaussian_matrix(&mut rng, n, d))).unwrap();
            if !satisfies_volume_floor(&s, c_s).unwrap() {
                continue;
            }
            accepted += 1;
            let full = log_volume(&s).unwrap().log_value;
            for j in 0..d {
                let rest = log_volume(&s.without_column(j)).unwrap().log_value;
                let r = residual_norm(&s, j).unwrap().ln();
                worst = worst.max((full - rest - r).abs());
            }
            if min_pairwise_column_distance(&s).unwrap() <= min_column_distance_floor(c_s) {
                floor_violations += 1;
            }
        }
    }
    report(
        2,
        "volume recursion and minimum column distance",
        worst <= 1e-8 && floor_violations == 0,
        start.elapsed(),
        Some(Duration::from_secs(10)),
        &format!("3x{per_level} matrices, worst recursion residual {worst:.3e}, {floor_violations} floor violations"),
    );
}

#[test]
fn criterion_03_bartlett_equivalence() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::desk(ExperimentKind::Bartlett);
    cfg.n = 300;
    cfg.m_values = vec![100];
    cfg.d = 8;
    cfg.trials = 20_000;
    cfg.master_seed = 303;
    let r = run_bartlett_equivalence(&cfg).unwrap();
    let var_rel = r.variance_relative_difference();
    let pass = r.ks.p_value > 0.01
        && (r.direct_mean - r.oracle_mean).abs() <= 4.0 * r.combined_std_error
        && var_rel <= 0.10;
    report(
        3,
        "direct pipeline matches chi-square decomposition",
        pass,
        start.elapsed(),
        Some(Duration::from_secs(60)),
        &format!(
            "KS D={:.4} p={:.3}, mean diff {:.2e} vs 4se {:.2e}, variance rel diff {:.3}",
            r.ks.statistic,
            r.ks.p_value,
            (r.direct_mean - r.oracle_mean).abs(),
            4.0 * r.combined_std_error,
            var_rel
        ),
    );
}

#[test]
fn criterion_04_volume_ratio_mean() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::desk(ExperimentKind::Lemma1);
    cfg.n = 400;
    cfg.d = 10;
    cfg.m_values = vec![200];
    cfg.trials = 10_000;
    cfg.master_seed = 404;
    let r = run_lemma1_concentration(&cfg).unwrap();
    let s = &r.per_m[0];
    let se = s.stats.std_error.unwrap();
    report(
        4,
        "mean log volume ratio at its center",
        s.pass && s.center == volume_ratio_center(200, 10).unwrap(),
        start.elapsed(),
        Some(Duration::from_secs(60)),
        &format!("mean {:.6} center {:.6} |diff| {:.2e} vs 4se {:.2e}", s.stats.mean, s.center, (s.stats.mean - s.center).abs(), 4.0 * se),
    );
}

#[test]
fn criterion_05_sine_product_mean() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::desk(ExperimentKind::Theorem2);
    cfg.n = 400;
    cfg.k = 5;
    cfg.m_values = vec![100, 200];
    cfg.trials = 2000;
    cfg.master_seed = 505;
    cfg.extra.insert("floor".into(), -5.0);
    let r = run_theorem2_scatter(&cfg).unwrap();
    let floor_ok = r.records.iter().all(|rec| rec.log_sines_original >= -5.0 - 1e-9);
    let detail: Vec<String> = r
        .per_m
        .iter()
        .map(|s| {
            format!(
                "M={} mean {:.5} center {:.5} |diff| {:.2e} vs 4se {:.2e}",
                s.m,
                s.stats.mean,
                s.center,
                (s.stats.mean - s.center).abs(),
                4.0 * s.stats.std_error.unwrap()
            )
        })
        .collect();
    let centers_ok = r.per_m.iter().all(|s| s.center == sine_product_center(s.m, 5).unwrap());
    report(
        5,
        "mean log sine-product ratio at its center",
        r.pass() && floor_ok && centers_ok && r.records.len() == 4000,
        start.elapsed(),
        Some(Duration::from_secs(120)),
        &detail.join("; "),
    );
}

#[test]
fn criterion_06_center_surface_claims() {
    let start = Instant::now();
    let m_grid: Vec<usize> = (50..=2000).collect();
    let d_grid: Vec<usize> = (1..=40).collect();
    let rows = run_fig1_surface(&m_grid, &d_grid).unwrap();
    let v = check_fig1_claims(&rows);
    report(
        6,
        "center negative, rising in m, falling in d",
        v.total() == 0 && rows.len() == m_grid.len() * 40,
        start.elapsed(),
        Some(Duration::from_secs(5)),
        &format!("{} grid points, violations {:?}", rows.len(), v),
    );
}

#[test]
fn criterion_07_digamma_quality() {
    let start = Instant::now();
    let mut worst_rec = 0.0f64;
    for i in 0..200 {
        let x = 10f64.powf(-2.0 + 7.0 * i as f64 / 199.0);
        let r = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
        worst_rec = worst_rec.max(r.abs());
    }
    let psi1 = (digamma(1.0).unwrap() + 0.5772156649015329).abs();
    let mut worst_id = 0.0f64;
    for m in 1..=2000usize {
        for k in 0..=m / 2 {
            let joint = if 2 * k < m {
                volume_ratio_center(m, 2 * k).unwrap()
            } else {
                volume_ratio_center_sum(m, 2 * k).unwrap()
            };
            let r = sine_product_center(m, k).unwrap() - (joint - 2.0 * volume_ratio_center(m, k).unwrap());
            worst_id = worst_id.max(r.abs());
        }
    }
    report(
        7,
        "digamma recurrence, psi(1), center identity",
        worst_rec <= 1e-12 && psi1 <= 1e-12 && worst_id <= 1e-12,
        start.elapsed(),
        Some(Duration::from_secs(5)),
        &format!("recurrence {worst_rec:.2e}, psi(1) error {psi1:.2e}, identity {worst_id:.2e}"),
    );
}

#[test]
fn criterion_08_perturbation_suite() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::desk(ExperimentKind::Perturbation);
    cfg.n = 200;
    cfg.k = 20;
    cfg.d = 8;
    cfg.trials = 500;
    cfg.master_seed = 808;
    cfg.extra.insert("c_s".into(), 0.3);
    cfg.extra.insert("delta0".into(), 1e-3);
    let r = run_perturbation_check(&cfg).unwrap();
    let gap = r.trials.iter().filter(|t| !t.gap_ok).count();
    let env = r.trials.iter().filter(|t| !t.envelope_ok).count();
    let dist = r.trials.iter().filter(|t| !t.distance_ok).count();
    let seeds: Vec<String> = r.violations().iter().map(|t| format!("{:?}", t.seed)).collect();
    report(
        8,
        "singular value gap and volume envelope under perturbation",
        r.trials.len() == 500 && gap == 0 && env == 0 && dist == 0,
        start.elapsed(),
        Some(Duration::from_secs(30)),
        &format!("500 trials, violations: gap {gap}, envelope {env}, distance {dist} {seeds:?}"),
    );
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn criterion_09_bound_regression() {
    let start = Instant::now();
    let mut rng = SeedSpec::new(909, 0).rng();
    let mut mismatches = 0;
    for _ in 0..20 {
        let l = rng.random_range(1..1_000_000u64);
        let k = rng.random_range(1..64usize);
        let eps = rng.random_range(0.01..2.0);
        let t = rng.random_range(0.01..20.0);
        let c = rng.random_range(0.01..5.0);
        let cp = rng.random_range(0.01..5.0);
        let p = BoundParams::new(l, k, 1, eps, t, 0.5, c, cp).unwrap();
        if measurement_bound_theorem1(&p).to_bits() != measurement_bound_length(l, k, eps, t, c, cp).to_bits() {
            mismatches += 1;
        }
    }
    let p = BoundParams::new(100, 8, 4, 0.5, 3.0, 0.5, 1.0, 1.0).unwrap();
    let frozen = [
        rel(measurement_bound_theorem1(&p), 98722.888409108087723),
        rel(measurement_bound_length(100, 8, 0.5, 3.0, 1.0, 1.0), 5014.7290323010610124),
        rel(measurement_bound_corollary1(4950, 4, 0.5, 3.0, 1.0, 1.0).unwrap(), 454974.92354002954113),
        rel(measurement_bound_davies(2, 1, 0.5, 0.0, 1.0).unwrap(), 18.257392765871344954),
        rel(measurement_bound_davies_pairwise(100, 8, 0.5, 3.0, 1.0).unwrap(), 150.49888271562498501),
    ];
    let worst = frozen.iter().copied().fold(0.0, f64::max);
    report(
        9,
        "bound formulas: single-column form and frozen values",
        mismatches == 0 && worst <= 1e-12,
        start.elapsed(),
        None,
        &format!("{mismatches}/20 bit mismatches, worst frozen rel error {worst:.2e}"),
    );
}

fn simulate(dir: &std::path::Path, name: &str, threads: &str, extra: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_grassmann-embed"))
        .args(["simulate", "--seed", "2718", "--threads", threads, "--out"])
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn criterion_10_cli_reproducibility() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 2] = [
        ("lemma1", &["--experiment", "lemma1", "--n", "120", "--d", "6", "--m", "30,60", "--trials", "400"]),
        ("theorem2", &["--experiment", "theorem2", "--n", "100", "--k", "3", "--m", "20,40", "--trials", "200"]),
    ];
    let mut identical = true;
    let mut sizes = Vec::new();
    for (name, args) in runs {
        let a = simulate(dir.path(), &format!("{name}_a.csv"), "1", args);
        let b = simulate(dir.path(), &format!("{name}_b.csv"), "1", args);
        let c = simulate(dir.path(), &format!("{name}_c.csv"), "8", args);
        identical &= a == b && a == c && !a.is_empty();
        sizes.push(format!("{name} {} bytes", a.len()));
    }
    report(
        10,
        "simulate output byte-identical across runs and thread counts",
        identical,
        start.elapsed(),
        None,
        &sizes.join(", "),
    );
}

#[test]
fn angle_endpoint_sanity() {
    // Guard for criterion 1: orthogonal lines have zero log sine product.
    let x = grassmann_embed::subspace::Subspace::new(DenseMatrix::identity_columns(3, 1)).unwrap();
    let y = grassmann_embed::subspace::Subspace::new(DenseMatrix::from_row_major(3, 1, &[0.0, 1.0, 0.0]).unwrap()).unwrap();
    let angles = grassmann_embed::subspace::principal_angles(&x, &y).unwrap();
    assert!((angles.angles()[0] - FRAC_PI_2).abs() < 1e-15);
}
