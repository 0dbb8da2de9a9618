//! The `grassmann-embed` command line.
//!
//! Exit codes: 0 success, 1 experiment acceptance failure, 2 usage, config,
//! parse or shape errors, 3 rank-deficient or non-disjoint inputs.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiments::{self, summary_path, write_atomic, ExperimentConfig, ExperimentKind};
use crate::format::g17;
use crate::matrix::DenseMatrix;
use crate::subspace::{log_product_principal_sines, log_volume, principal_angles, Subspace};
use crate::theory::{
    measurement_bound_corollary1, measurement_bound_davies, measurement_bound_davies_pairwise,
    measurement_bound_length, measurement_bound_theorem1, sine_product_center, volume_ratio_center,
    volume_ratio_center_asymptotic, BoundParams, DEFAULT_C, DEFAULT_C_PRIME,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ACCEPTANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GEOMETRY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "grassmann-embed", version, about = "Volume-preserving compression of subspaces")]
pub struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file. Without it values go to stdout and `simulate` writes
    /// `<experiment>.csv`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Worker threads for experiments. Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON config file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concentration center of a log-volume or log sine-product ratio.
    Center(CenterArgs),
    /// Sufficient number of measurements.
    Bound(BoundArgs),
    /// Volumes and principal angles of matrices read from files.
    Geometry(GeometryArgs),
    /// Run an experiment and write its records and summary.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenterMode {
    Volume,
    Sine,
}

#[derive(Debug, Args)]
pub struct CenterArgs {
    #[arg(long, value_enum)]
    pub mode: CenterMode,
    #[arg(long)]
    pub m: usize,
    /// Parallelotope dimension (volume mode).
    #[arg(long)]
    pub d: Option<usize>,
    /// Subspace dimension (sine mode).
    #[arg(long)]
    pub k: Option<usize>,
    /// Use the large-m approximation (volume mode).
    #[arg(long)]
    pub asymptotic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    Theorem1,
    Length,
    Corollary1,
    Davies,
    DaviesPairwise,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub formula: Formula,
    /// Number of subspaces (L̄ for corollary1).
    #[arg(long)]
    pub l: u64,
    #[arg(long)]
    pub k: usize,
    /// Parallelotope dimension (theorem1).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub t: f64,
    /// Volume floor C_s (theorem1).
    #[arg(long, default_value_t = 0.5)]
    pub c_s: f64,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub c_prime: Option<f64>,
    /// Isometry constant δ (davies).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Concentration constant c (davies).
    #[arg(long, default_value_t = 1.0)]
    pub c_davies: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryOp {
    Volume,
    Angles,
    Sines,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long, value_enum)]
    pub op: GeometryOp,
    /// Matrix file (`.json` or CSV).
    #[arg(long)]
    pub x: PathBuf,
    /// Second matrix file for `angles` and `sines`.
    #[arg(long)]
    pub y: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Desk,
    Full,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub experiment: Option<ExperimentKind>,
    #[arg(long, value_enum, default_value_t = Preset::Desk)]
    pub preset: Preset,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated row counts.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Experiment-specific setting, e.g. `--set floor=-5`. Repeatable.
    #[arg(long = "set", value_parser = parse_key_value)]
    pub set: Vec<(String, f64)>,
}

fn parse_key_value(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("not a number: {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

/// Contents of `--config`. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<ExperimentKind>,
    pub n: Option<usize>,
    pub m_values: Option<Vec<usize>>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// Failure of one invocation, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RankDeficient { .. } | Error::NotDisjoint => EXIT_GEOMETRY,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Center(a) => {
            let value = center(a)?;
            emit_value(cli, stdout, &[value])
        }
        Command::Bound(a) => {
            let value = bound(a, stderr)?;
            emit_value(cli, stdout, &[value])
        }
        Command::Geometry(a) => {
            let values = geometry(a)?;
            emit_value(cli, stdout, &values)
        }
        Command::Simulate(a) => simulate(cli, a, file, stdout, stderr),
    }
}

fn center(a: &CenterArgs) -> Result<f64> {
    match a.mode {
        CenterMode::Volume => {
            let d = a.d.ok_or_else(|| Error::BadShape("--d is required for volume mode".into()))?;
            if a.asymptotic {
                volume_ratio_center_asymptotic(a.m, d)
            } else {
                volume_ratio_center(a.m, d)
            }
        }
        CenterMode::Sine => {
            let k = a.k.ok_or_else(|| Error::BadShape("--k is required for sine mode".into()))?;
            sine_product_center(a.m, k)
        }
    }
}

fn bound(a: &BoundArgs, stderr: &mut dyn Write) -> Result<f64> {
    let need_eps = || a.eps.ok_or_else(|| Error::Domain("--eps is required".into()));
    let constants = |stderr: &mut dyn Write| {
        if a.c.is_none() || a.c_prime.is_none() {
            let _ = writeln!(
                stderr,
                "warning: C and C' default to {DEFAULT_C} and {DEFAULT_C_PRIME}; these are illustrative, not derived"
            );
        }
        (a.c.unwrap_or(DEFAULT_C), a.c_prime.unwrap_or(DEFAULT_C_PRIME))
    };
    match a.formula {
        Formula::Theorem1 => {
            let d = a.d.ok_or_else(|| Error::Domain("--d is required for theorem1".into()))?;
            let eps = need_eps()?;
            let (c, cp) = constants(stderr);
            Ok(measurement_bound_theorem1(&BoundParams::new(a.l, a.k, d, eps, a.t, a.c_s, c, cp)?))
        }
        Formula::Length => {
            let eps = need_eps()?;
            let (c, cp) = constants(stderr);
            BoundParams::new(a.l, a.k, 1, eps, a.t, a.c_s, c, cp)?;
            Ok(measurement_bound_length(a.l, a.k, eps, a.t, c, cp))
        }
        Formula::Corollary1 => {
            let eps = need_eps()?;
            let (c, cp) = constants(stderr);
            measurement_bound_corollary1(a.l, a.k, eps, a.t, c, cp)
        }
        Formula::Davies | Formula::DaviesPairwise => {
            let delta = a.delta.ok_or_else(|| Error::Domain("--delta is required for davies".into()))?;
            if a.formula == Formula::Davies {
                measurement_bound_davies(a.l, a.k, delta, a.t, a.c_davies)
            } else {
                measurement_bound_davies_pairwise(a.l, a.k, delta, a.t, a.c_davies)
            }
        }
    }
}

fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        DenseMatrix::from_json(&std::fs::read_to_string(path)?)
    } else {
        DenseMatrix::read_csv(std::fs::File::open(path)?)
    }
}

fn geometry(a: &GeometryArgs) -> Result<Vec<f64>> {
    let x = read_matrix(&a.x)?;
    if a.op == GeometryOp::Volume {
        return Ok(vec![log_volume(&x)?.log_value]);
    }
    let y_path = a.y.as_ref().ok_or_else(|| Error::BadShape("--y is required for this op".into()))?;
    let y = read_matrix(y_path)?;
    let (x, y) = (Subspace::new(x)?, Subspace::new(y)?);
    match a.op {
        GeometryOp::Angles => Ok(principal_angles(&x, &y)?.angles().to_vec()),
        _ => Ok(vec![log_product_principal_sines(&x, &y)?]),
    }
}

fn emit_value(cli: &Cli, stdout: &mut dyn Write, values: &[f64]) -> std::result::Result<i32, Failure> {
    let text = match cli.format {
        OutputFormat::Csv => values.iter().map(|v| g17(*v)).collect::<Vec<_>>().join(",") + "\n",
        OutputFormat::Json => {
            let doc = if values.len() == 1 {
                serde_json::json!({ "value": values[0] })
            } else {
                serde_json::json!({ "values": values })
            };
            doc.to_string() + "\n"
        }
    };
    match &cli.out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            let _ = writeln!(stdout, "{}", path.display());
        }
        None => {
            let _ = write!(stdout, "{text}");
        }
    }
    Ok(EXIT_OK)
}

/// Preset, then config file, then flags.
fn build_config(cli: &Cli, a: &SimulateArgs, file: &ConfigFile) -> std::result::Result<ExperimentConfig, Failure> {
    let kind = a
        .experiment
        .or(file.experiment)
        .ok_or_else(|| usage("--experiment is required (flag or config file)"))?;
    let mut cfg = match a.preset {
        Preset::Desk => ExperimentConfig::desk(kind),
        Preset::Full => ExperimentConfig::full(kind),
    };
    let layers: [(Option<usize>, Option<usize>, Option<usize>, Option<usize>, Option<Vec<usize>>); 2] = [
        (file.n, file.k, file.d, file.trials, file.m_values.clone()),
        (a.n, a.k, a.d, a.trials, a.m.clone()),
    ];
    for (n, k, d, trials, m) in layers {
        cfg.n = n.unwrap_or(cfg.n);
        cfg.k = k.unwrap_or(cfg.k);
        cfg.d = d.unwrap_or(cfg.d);
        cfg.trials = trials.unwrap_or(cfg.trials);
        if let Some(m) = m {
            cfg.m_values = m;
        }
    }
    cfg.master_seed = cli.seed.or(file.seed).unwrap_or(cfg.master_seed);
    cfg.extra.extend(file.extra.clone());
    cfg.extra.extend(a.set.iter().cloned());
    cfg.validate()?;
    Ok(cfg)
}

fn simulate(
    cli: &Cli,
    a: &SimulateArgs,
    file: ConfigFile,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let cfg = build_config(cli, a, &file)?;
    let threads = cli.threads.or(file.threads);
    let output = match threads {
        Some(0) => return Err(usage("--threads must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| usage(e.to_string()))?
            .install(|| experiments::run(&cfg))?,
        None => experiments::run(&cfg)?,
    };
    let ext = match cli.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.{ext}", cfg.name)));
    let records = match cli.format {
        OutputFormat::Csv => output.table.to_csv(),
        OutputFormat::Json => output.table.to_json(),
    };
    write_atomic(&out, &records)?;
    let summary = summary_path(&out);
    write_atomic(&summary, &output.summary.to_json())?;
    let _ = writeln!(stdout, "{}", out.display());
    let _ = writeln!(stdout, "{}", summary.display());
    if output.summary.pass {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(stderr, "{}: acceptance check failed; see {}", cfg.name, summary.display());
        Ok(EXIT_ACCEPTANCE)
    }
}
