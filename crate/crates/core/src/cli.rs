//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error,
//! 4 internal invariant violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{eval_rows, fit_rates, sweep, ExperimentConfig, RateFit, SceneConfig};
use crate::io::{self, EvalRow};
use crate::metrics::{evaluate, EvalConfig};
use crate::params::{practical_schedule, ParamSchedule, ScheduleOverrides};
use crate::samplers::sample_mixture;
use crate::stratify::{run_with_options, RunOptions, StratificationResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "slabeling", version, about = "Stratified manifold learning by slab co-detection")]
pub struct Cli {
    /// Worker threads (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a scene and write `cloud_n{N}_s{SEED}.csv` plus its JSON sidecar.
    Generate(GenerateArgs),
    /// Run the detector on a cloud and write the result JSON.
    Run(RunArgs),
    /// Score a result against ground truth; appends rows to an evaluation CSV.
    Evaluate(EvaluateArgs),
    /// Fit convergence slopes from an evaluation CSV.
    Rates(RatesArgs),
    /// Generate, run and evaluate every (n, seed) of an experiment config.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub preset: Option<String>,
    /// Experiment config; generates its whole `n_grid x seeds`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Cloud CSV.
    pub cloud: PathBuf,
    /// Complete parameter schedule JSON.
    #[arg(long, conflicts_with = "config")]
    pub schedule: Option<PathBuf>,
    /// Schedule overrides JSON applied to the practical rule.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Recorded in the result metadata.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tuples examined per anchor before giving up; 0 means no cap.
    #[arg(long)]
    pub max_tuples: Option<usize>,
    /// Leave the wall-clock block out of the JSON.
    #[arg(long)]
    pub no_timing: bool,
    /// Result path; default `<cloud stem>.result.json` next to the cloud.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Result JSON.
    pub result: PathBuf,
    /// Cloud CSV with labels; its sidecar must exist.
    pub truth: PathBuf,
    /// Evaluation config JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report path; default `<result stem>.report.json`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Evaluation CSV to append to.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Evaluation CSV.
    pub input: PathBuf,
    /// Slope table CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write clouds, results and reports per trial.
    #[arg(long)]
    pub keep: bool,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => EXIT_INVARIANT,
        Error::InvalidCellSize(_)
        | Error::InvalidDims { .. }
        | Error::InconsistentOverride { .. }
        | Error::InvalidParameter(_)
        | Error::Weight(_)
        | Error::UnknownPreset(_)
        | Error::EmptyCloud
        | Error::TooLarge { .. } => EXIT_USAGE,
        Error::Degenerate(_)
        | Error::EmptyLayer(_)
        | Error::MissingLabels
        | Error::MissingSpecs
        | Error::DimensionMismatch { .. }
        | Error::InsufficientData(_)
        | Error::Io { .. }
        | Error::Parse { .. }
        | Error::Json { .. } => EXIT_DATA,
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(msg) => {
            if !msg.is_empty() {
                print!("{msg}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command; returns what it would print.
pub fn execute(cli: &Cli) -> Result<String> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::InvalidParameter("--threads must be positive".into()));
        }
        // Fails only if a global pool exists already, e.g. in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run_cmd(a, cli.threads),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Rates(a) => rates_cmd(a),
        Command::Sweep(a) => sweep_cmd(a, cli.threads),
    }
}

pub fn cloud_file_name(n: usize, seed: u64) -> String {
    format!("cloud_n{n}_s{seed}.csv")
}

fn generate(a: &GenerateArgs) -> Result<String> {
    let (scene, grid, seeds) = match (&a.config, &a.preset) {
        (Some(path), None) => {
            let cfg: ExperimentConfig = io::read_json(path)?;
            cfg.validate()?;
            (cfg.scene.resolve()?, cfg.n_grid, cfg.seeds)
        }
        (None, Some(name)) => {
            let n = a
                .n
                .ok_or_else(|| Error::InvalidParameter("--n is required with --preset".into()))?;
            (SceneConfig::Preset(name.clone()).resolve()?, vec![n], vec![a.seed])
        }
        _ => return Err(Error::InvalidParameter("give exactly one of --preset or --config".into())),
    };
    let mut out = String::new();
    for &n in &grid {
        for &seed in &seeds {
            let cloud = sample_mixture(&scene.specs, &scene.weights, n, seed)?;
            let path = a.output.join(cloud_file_name(n, seed));
            io::write_cloud(&path, &cloud)?;
            let _ = writeln!(out, "{}", path.display());
        }
    }
    Ok(out)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn run_cmd(a: &RunArgs, threads: Option<usize>) -> Result<String> {
    let cloud = io::read_cloud(&a.cloud)?;
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let sched: ParamSchedule = match (&a.schedule, &a.config) {
        (Some(p), _) => io::read_json(p)?,
        (None, Some(p)) => {
            let o: ScheduleOverrides = io::read_json(p)?;
            practical_schedule(cloud.len(), cloud.ambient(), &o)?
        }
        (None, None) => practical_schedule(cloud.len(), cloud.ambient(), &ScheduleOverrides::default())?,
    };
    let opts = RunOptions {
        threads,
        max_tuples_per_anchor: match a.max_tuples {
            Some(0) => None,
            Some(c) => Some(c),
            None => RunOptions::default().max_tuples_per_anchor,
        },
        seed: a.seed.or(cloud.seed),
    };
    let result = run_with_options(&cloud.points, &sched, &opts)?;
    result.check_invariants(cloud.len())?;
    let path = a.output.clone().unwrap_or_else(|| with_suffix(&a.cloud, ".result.json"));
    write_result(&path, &result, !a.no_timing)?;
    let (k, dims) = crate::metrics::extract_structure(&result);
    Ok(format!("{}: K_hat = {k}, dims = {dims:?}\n", path.display()))
}

/// Result JSON, optionally without the timing block so reruns are
/// byte-identical.
pub fn write_result(path: &Path, res: &StratificationResult, timing: bool) -> Result<()> {
    let mut v = serde_json::to_value(res).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    if !timing {
        if let Some(m) = v.as_object_mut() {
            m.remove("run_info");
        }
    }
    io::write_json_compact(path, &v)
}

fn evaluate_cmd(a: &EvaluateArgs) -> Result<String> {
    let result: StratificationResult = io::read_json(&a.result)?;
    let truth = io::read_truth(&a.truth)?;
    result.check_invariants(truth.len()).map_err(|e| match e {
        Error::Invariant(m) => Error::InvalidParameter(format!("result does not match the cloud: {m}")),
        other => other,
    })?;
    let cfg: EvalConfig = match &a.config {
        Some(p) => io::read_json(p)?,
        None => EvalConfig::default(),
    };
    let report = evaluate(&result, &truth, &cfg)?;
    let path = a.output.clone().unwrap_or_else(|| with_suffix(&a.result, ".report.json"));
    io::write_json(&path, &report)?;
    let rows = eval_rows(&report, result.run_info.wall_ms);
    if let Some(csv) = &a.csv {
        io::append_eval_rows(csv, &rows)?;
    }
    let mut out = format!(
        "{}: K_hat = {}, dims = {:?} (true {:?}), label check {:.4}\n",
        path.display(),
        report.k_hat,
        report.dims,
        report.true_dims,
        report.label_check
    );
    for r in &rows {
        let _ = writeln!(
            out,
            "  layer {} (d = {}): hausdorff {}, clustering {:.4}, tangent {}",
            r.layer,
            r.dim,
            fmt_opt(r.hausdorff),
            r.clustering,
            fmt_opt(r.tangent)
        );
    }
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4e}"))
}

fn rates_cmd(a: &RatesArgs) -> Result<String> {
    let rows = io::read_eval_rows(&a.input)?;
    let fits = fit_rates(&rows)?;
    if let Some(p) = &a.output {
        write_fits(p, &fits)?;
    }
    Ok(format_fits(&fits))
}

pub fn format_fits(fits: &[RateFit]) -> String {
    let mut out = format!("{:>5} {:>3} {:<10} {:>9} {:>9} {:>3}\n", "layer", "dim", "loss", "slope", "se", "pts");
    for f in fits {
        let _ = writeln!(
            out,
            "{:>5} {:>3} {:<10} {:>9} {:>9} {:>3}",
            f.layer,
            f.dim,
            f.loss.name(),
            f.slope.map_or("-".into(), |s| format!("{s:.4}")),
            f.std_error.map_or("-".into(), |s| format!("{s:.4}")),
            f.medians.len()
        );
    }
    out
}

/// Header `layer,dim,loss,slope,std_error,intercept,points`.
pub fn write_fits(path: &Path, fits: &[RateFit]) -> Result<()> {
    let mut text = String::from("layer,dim,loss,slope,std_error,intercept,points\n");
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for f in fits {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            f.layer,
            f.dim,
            f.loss.name(),
            opt(f.slope),
            opt(f.std_error),
            opt(f.intercept),
            f.medians.len()
        );
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn sweep_cmd(a: &SweepArgs, threads: Option<usize>) -> Result<String> {
    let mut cfg: ExperimentConfig = io::read_json(&a.config)?;
    if let Some(o) = &a.output {
        cfg.output_dir = o.clone();
    }
    if threads.is_some() {
        cfg.threads = threads;
    }
    let dir = cfg.output_dir.clone();
    let mut failure = None;
    let rows: Vec<EvalRow> = sweep(&cfg, |trial, n, seed| {
        eprintln!(
            "n = {n}, seed = {seed}: K_hat = {}, {:.0} ms",
            trial.result.k_hat, trial.result.run_info.wall_ms
        );
        if a.keep && failure.is_none() {
            let base = dir.join(cloud_file_name(n, seed));
            let r = io::write_cloud(&base, &trial.cloud)
                .and_then(|_| write_result(&with_suffix(&base, ".result.json"), &trial.result, true))
                .and_then(|_| io::write_json(&with_suffix(&base, ".report.json"), &trial.report));
            failure = r.err();
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let csv = dir.join("eval.csv");
    io::write_eval_rows(&csv, &rows)?;
    let mut out = format!("{}\n", csv.display());
    match fit_rates(&rows) {
        Ok(fits) => {
            write_fits(&dir.join("rates.csv"), &fits)?;
            out.push_str(&format_fits(&fits));
        }
        Err(Error::InsufficientData(m)) => {
            let _ = writeln!(out, "no rate fit: {m}");
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}
