//! Command-line front end.
//!
//! `detect` fits change-points to a CSV file, `simulate` runs a Monte-Carlo
//! study and writes a report table, `scenarios` lists the built-in scenarios.
//! Exit codes: 0 success, 2 usage/parse/IO errors, 3 infeasible
//! configurations.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::pipeline::{criterion_curve, fit_from_curve, run_estimator, Estimator, FitResult};
use crate::signal::{ChangePointSet, PiecewiseSignal, Series};
use crate::simulate::{
    find_scenario, run_simulation, scenario_catalog, suggested_k_max, write_report_csv, NoiseKind,
    Scenario,
};

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "CPCV_SEED";

/// Default number of change-points considered by `detect`.
pub const DEFAULT_DETECT_KMAX: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "cpcv", version, about = "Change-point detection with cross-validated model selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate change-points in a CSV file (one row per design point).
    Detect(DetectArgs),
    /// Run a simulation study and write a CSV report.
    Simulate(SimulateArgs),
    /// List the built-in scenarios.
    Scenarios,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Copps,
    Cv1,
    Cvmod,
    #[value(name = "cv1-vfold")]
    Cv1Vfold,
    #[value(name = "cvmod-vfold")]
    CvmodVfold,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
struct DetectArgs {
    /// Input CSV file.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "cv1-vfold")]
    method: MethodArg,
    /// Number of folds for the V-fold methods.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Largest number of change-points considered.
    #[arg(long, default_value_t = DEFAULT_DETECT_KMAX)]
    kmax: usize,
    /// Skip the first line of the input.
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum, default_value = "text")]
    out: OutputFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    T5,
    Exp,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    /// Catalog scenario name (see `cpcv scenarios`).
    #[arg(long, required_unless_present = "levels")]
    scenario: Option<String>,
    /// Comma-separated methods: copps, cv1, cvmod, cv1-vfold[:V], cvmod-vfold[:V].
    #[arg(long, default_value = "copps,cv1,cvmod,cv1-vfold")]
    methods: String,
    /// Number of replications.
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Largest number of change-points considered; defaults to
    /// max(10, K + 4) for the scenario's true K.
    #[arg(long)]
    kmax: Option<usize>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Custom scenario: series length.
    #[arg(long, requires = "levels")]
    n: Option<usize>,
    /// Custom scenario: comma-separated change-points.
    #[arg(long, requires = "levels", value_delimiter = ',', allow_negative_numbers = true)]
    cps: Vec<usize>,
    /// Custom scenario: comma-separated segment levels.
    #[arg(long, requires = "n", value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "scenario")]
    levels: Vec<f64>,
    /// Custom scenario: noise distribution.
    #[arg(long, value_enum, default_value = "gaussian")]
    noise: NoiseArg,
    /// Custom scenario: noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

enum Failure {
    Usage(String),
    Infeasible(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Io(_) | Error::BadSeries(_) => Failure::Usage(err.to_string()),
            other => Failure::Infeasible(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Usage(err.to_string())
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let rendered = err.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Detect(args) => detect(&args, stdout),
        Command::Simulate(args) => simulate(&args, stdout),
        Command::Scenarios => list_scenarios(stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Infeasible(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            3
        }
    }
}

fn estimator_for(method: MethodArg, folds: usize) -> Estimator {
    match method {
        MethodArg::Copps => Estimator::Copps,
        MethodArg::Cv1 => Estimator::Cv1TwoFold,
        MethodArg::Cvmod => Estimator::CvModTwoFold,
        MethodArg::Cv1Vfold => Estimator::Cv1Vfold(folds),
        MethodArg::CvmodVfold => Estimator::CvModVfold(folds),
    }
}

#[derive(Serialize)]
struct SegmentOut {
    start: usize,
    end: usize,
    level: Vec<f64>,
}

#[derive(Serialize)]
struct CriterionOut {
    l: usize,
    /// `null` for infeasible candidates.
    value: Option<f64>,
}

#[derive(Serialize)]
struct DetectOut {
    method: String,
    n: usize,
    d: usize,
    k_hat: usize,
    change_points: Vec<usize>,
    segments: Vec<SegmentOut>,
    criterion: Vec<CriterionOut>,
}

impl DetectOut {
    fn new(method: Estimator, series: &Series, fit: &FitResult) -> Self {
        let segments = fit
            .final_cps
            .segments()
            .zip(fit.f_hat.levels())
            .map(|((a, b), level)| SegmentOut { start: a + 1, end: b, level: level.clone() })
            .collect();
        let criterion = fit
            .curve
            .iter()
            .map(|(l, v)| CriterionOut { l, value: v.is_finite().then_some(v) })
            .collect();
        Self {
            method: method.label(),
            n: series.len(),
            d: series.dim(),
            k_hat: fit.k_hat,
            change_points: fit.final_cps.taus().to_vec(),
            segments,
            criterion,
        }
    }
}

fn detect(args: &DetectArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let series = Series::read_csv_path(&args.input, args.header)?;
    let method = estimator_for(args.method, args.folds);
    let fit = if args.kmax == 0 {
        fit_from_curve(&series, criterion_curve(&series, method, 0)?)?
    } else {
        run_estimator(&series, method, args.kmax)?
    };
    let out = DetectOut::new(method, &series, &fit);
    match args.out {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *stdout, &out)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(stdout)?;
        }
        OutputFormat::Csv => write_detect_csv(&out, stdout)?,
        OutputFormat::Text => write_detect_text(&out, stdout)?,
    }
    Ok(())
}

/// Rows `kind,index,start,end,value_1..value_d`: one `segment` row per
/// fitted segment and one `criterion` row per candidate L.
fn write_detect_csv(out: &DetectOut, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut wtr = csv::WriterBuilder::new().flexible(false).from_writer(stdout);
    let mut header = vec!["kind".to_string(), "index".into(), "start".into(), "end".into()];
    header.extend((1..=out.d).map(|j| format!("value_{j}")));
    let csv_err = |e: csv::Error| Failure::Usage(e.to_string());
    wtr.write_record(&header).map_err(csv_err)?;
    for (k, seg) in out.segments.iter().enumerate() {
        let mut row = vec!["segment".to_string(), k.to_string(), seg.start.to_string(), seg.end.to_string()];
        row.extend(seg.level.iter().map(|v| v.to_string()));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    for c in &out.criterion {
        let mut row = vec!["criterion".to_string(), c.l.to_string(), String::new(), String::new()];
        row.push(c.value.map_or_else(|| "inf".to_string(), |v| v.to_string()));
        row.extend((1..out.d).map(|_| String::new()));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

fn write_detect_text(out: &DetectOut, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "method: {}", out.method)?;
    writeln!(w, "observations: {} (dimension {})", out.n, out.d)?;
    writeln!(w, "estimated number of change-points: {}", out.k_hat)?;
    let cps: Vec<String> = out.change_points.iter().map(ToString::to_string).collect();
    writeln!(w, "change-points: {}", if cps.is_empty() { "none".into() } else { cps.join(" ") })?;
    writeln!(w, "segments:")?;
    for seg in &out.segments {
        let level: Vec<String> = seg.level.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(w, "  {:>6} .. {:<6} level {}", seg.start, seg.end, level.join(" "))?;
    }
    writeln!(w, "criterion:")?;
    for c in &out.criterion {
        match c.value {
            Some(v) => writeln!(w, "  L = {:>3}  {v:.6}", c.l)?,
            None => writeln!(w, "  L = {:>3}  inf", c.l)?,
        }
    }
    Ok(())
}

fn seed_from_env(default: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={value:?} is not an unsigned integer"))),
        Err(_) => Ok(default),
    }
}

fn custom_scenario(args: &SimulateArgs) -> Result<Scenario, Failure> {
    let n = args.n.ok_or_else(|| Failure::Usage("--n is required with --levels".into()))?;
    let cps = ChangePointSet::new(n, args.cps.clone())?;
    let signal = PiecewiseSignal::univariate(cps, &args.levels)?;
    let kind = match args.noise {
        NoiseArg::Gaussian => NoiseKind::Gaussian { sigma: args.sigma },
        NoiseArg::T5 => NoiseKind::StudentT5 { sigma: args.sigma },
        NoiseArg::Exp => NoiseKind::CenteredExp { sigma: args.sigma },
    };
    Ok(Scenario::new("custom", signal, kind)?)
}

fn simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let seed = seed_from_env(args.seed)?;
    let scenario = match &args.scenario {
        Some(name) => find_scenario(name)
            .ok_or_else(|| Failure::Infeasible(format!("unknown scenario {name:?}")))?,
        None => custom_scenario(args)?,
    }
    .with_seed(seed);
    let methods = args
        .methods
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse::<Estimator>)
        .collect::<Result<Vec<_>, _>>()?;
    let k_max = args.kmax.unwrap_or_else(|| suggested_k_max(&scenario));
    let reports = run_simulation(&scenario, &methods, args.reps, k_max, args.workers)?;
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            write_report_csv(&reports, std::io::BufWriter::new(file))?;
        }
        None => write_report_csv(&reports, &mut *stdout)?,
    }
    Ok(())
}

fn list_scenarios(stdout: &mut dyn Write) -> Result<(), Failure> {
    for s in scenario_catalog() {
        writeln!(stdout, "{:<34} n={:<5} K={:<3} noise={:?}", s.name, s.signal.n(), s.true_k(), s.noise.kind)?;
    }
    Ok(())
}
