//! The `phaseprox` command-line front end.
//!
//! ```text
//! phaseprox verify
//! phaseprox solve --config solve.ini --out results/
//! phaseprox bench --config bench.ini --out results/ --jobs 4
//! phaseprox plot results/aggregate.csv --out charts/
//! ```
//!
//! Every written file is a function of the config and the seed alone;
//! with `timing = off` this includes the timing columns.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{MagnitudeSet, TorusProjector};
use crate::harness::{
    parse_aggregate_csv, recovery_metric, restart_init, run_grid, trial_instance, write_aggregate_csv,
    write_trials_csv, write_trials_jsonl, ExperimentConfig,
};
use crate::priors::PriorSpec;
use crate::report::{recovery_chart, timing_chart};
use crate::solvers::{solve, truncate_topk, Termination};
use crate::verify::run_all;

pub use config::{BenchConfig, ConfigFile, InitMode, SolveConfig};

#[derive(Debug, Parser)]
#[command(
    name = "phaseprox",
    version,
    about = "Sparse phase retrieval from Fourier magnitudes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Configuration file (`solve` and `bench`).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,

    /// Overrides the seed given in the config.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Worker threads for `bench`.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the numerical self-checks.
    Verify,
    /// Solve one instance and write `solution.json`.
    Solve,
    /// Run a benchmark grid and write CSV tables and SVG charts.
    Bench,
    /// Re-render the SVG charts of a saved aggregate table.
    Plot {
        /// An `aggregate.csv` written by `bench`.
        aggregate: PathBuf,
    },
}

/// Runs a parsed command line. Returns `false` when verification fails.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let config = || {
        cli.config
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("this command needs --config <path>".into()))
    };
    match &cli.command {
        Command::Verify => cmd_verify(stdout),
        Command::Solve => {
            let file = ConfigFile::load(config()?)?;
            let mut cfg = SolveConfig::from_file(&file)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let solution = cmd_solve(&cfg, &cli.out, stderr)?;
            emit(
                stdout,
                format!(
                    "{}: n = {}, residual {:.3e} after {} iterations ({:?}), wrote {}",
                    solution.method,
                    solution.n,
                    solution.residual,
                    solution.iterations,
                    solution.termination,
                    cli.out.join(SOLUTION_FILE).display()
                ),
            )?;
            Ok(true)
        }
        Command::Bench => {
            let file = ConfigFile::load(config()?)?;
            let mut cfg = BenchConfig::from_file(&file)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let cells = cmd_bench(&cfg, &cli.out, cli.jobs)?;
            emit(stdout, format!("{cells} cells, wrote {}", cli.out.display()))?;
            Ok(true)
        }
        Command::Plot { aggregate } => {
            cmd_plot(aggregate, &cli.out)?;
            emit(stdout, format!("wrote charts to {}", cli.out.display()))?;
            Ok(true)
        }
    }
}

fn emit(w: &mut dyn Write, line: String) -> Result<()> {
    writeln!(w, "{line}").map_err(|e| Error::io("<stdout>", e))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))
}

/// Prints one line per check and a summary; `true` iff every check passed.
pub fn cmd_verify(stdout: &mut dyn Write) -> Result<bool> {
    let reports = run_all()?;
    for r in &reports {
        emit(stdout, r.to_string())?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    emit(stdout, format!("{} checks, {failed} failed", reports.len()))?;
    Ok(failed == 0)
}

pub const SOLUTION_FILE: &str = "solution.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub method: String,
    pub prior: PriorSpec,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub best_restart: usize,
    pub final_x: Vec<f64>,
    /// `|| |dft(final_x)| - c ||^2`
    pub residual: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub final_objective: f64,
    pub clamped_measurements: usize,
    /// Present for generated instances.
    pub ground_truth: Option<Vec<f64>>,
    pub recovered: Option<bool>,
}

/// Reads magnitudes separated by whitespace or commas; `#` starts a comment line.
pub fn read_measurements(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for token in line.split([',', ' ', '\t']).filter(|t| !t.is_empty()) {
            let value = token.parse::<f64>().map_err(|e| Error::Config {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("`{token}`: {e}"),
            })?;
            if !value.is_finite() {
                return Err(Error::InvalidMeasurement {
                    index: out.len(),
                    value,
                });
            }
            out.push(value);
        }
    }
    Ok(out)
}

/// Solves one instance from `cfg.restarts` starts and keeps the smallest residual.
pub fn cmd_solve(cfg: &SolveConfig, out: &Path, stderr: &mut dyn Write) -> Result<Solution> {
    let supplied = match &cfg.measurements {
        Some(path) => {
            let (m, clamped) = MagnitudeSet::clamped(read_measurements(path)?)?;
            if clamped > 0 {
                emit(
                    stderr,
                    format!(
                        "warning: {clamped} negative measurements in {} set to zero",
                        path.display()
                    ),
                )?;
            }
            Some((m, clamped))
        }
        None => None,
    };
    let n = supplied.as_ref().map_or(cfg.n, |(m, _)| m.len());
    let mut experiment = ExperimentConfig::new(cfg.method.clone(), n, cfg.k, cfg.snr_db, cfg.seed);
    experiment.trials = 1;
    experiment.restarts = cfg.restarts;
    experiment.validate()?;
    let (truth, measurements, clamped) = match supplied {
        Some((m, clamped)) => (None, m, clamped),
        None => {
            let (x0, m) = trial_instance(&experiment, 0)?;
            (Some(x0), m, 0)
        }
    };

    let solver = cfg.method.solver_config(n, cfg.k)?;
    let projector = TorusProjector::new(measurements.clone());
    let mut best: Option<(f64, usize, Vec<f64>, crate::solvers::SolverRun)> = None;
    for r in 0..cfg.restarts {
        let init = match cfg.init {
            InitMode::Random => restart_init(&experiment, 0, r)?,
            InitMode::Truth => truth.clone().expect("checked when parsing"),
            InitMode::Zero => vec![0.0; n],
        };
        let run = solve(&measurements, &solver, &init)?;
        let candidate = if cfg.truncate {
            truncate_topk(&run.final_x, cfg.k)?
        } else {
            run.final_x.clone()
        };
        let residual = projector.residual(&candidate)?;
        if best.as_ref().is_none_or(|b| residual < b.0) {
            best = Some((residual, r, candidate, run));
        }
    }
    let (residual, best_restart, final_x, run) = best.expect("at least one restart");
    let recovered = truth.as_ref().map(|x0| recovery_metric(&final_x, x0)).transpose()?;
    let solution = Solution {
        method: cfg.method.label.clone(),
        prior: solver.prior.clone(),
        n,
        k: cfg.k,
        seed: cfg.seed,
        restarts: cfg.restarts,
        best_restart,
        final_x,
        residual,
        iterations: run.iterations,
        termination: run.termination,
        final_objective: run.final_objective(),
        clamped_measurements: clamped,
        ground_truth: truth,
        recovered,
    };
    let mut json = serde_json::to_string_pretty(&solution)?;
    json.push('\n');
    write_file(out, SOLUTION_FILE, &json)?;
    Ok(solution)
}

pub const TRIALS_CSV: &str = "trials.csv";
pub const TRIALS_JSONL: &str = "trials.jsonl";
pub const AGGREGATE_CSV: &str = "aggregate.csv";
pub const RECOVERY_SVG: &str = "recovery.svg";
pub const TIMING_SVG: &str = "timing.svg";

/// Runs the grid and writes the tables and charts; returns the number of cells.
pub fn cmd_bench(cfg: &BenchConfig, out: &Path, jobs: usize) -> Result<usize> {
    let result = run_grid(&cfg.grid(), jobs)?;
    write_file(out, TRIALS_CSV, &write_trials_csv(&result.trials)?)?;
    write_file(out, TRIALS_JSONL, &write_trials_jsonl(&result.trials)?)?;
    let aggregate = write_aggregate_csv(&result.rows)?;
    write_file(out, AGGREGATE_CSV, &aggregate)?;
    // charts are drawn from the table as written, so `plot` reproduces them exactly
    render_charts(&aggregate, &out.join(AGGREGATE_CSV), out)?;
    Ok(result.rows.len())
}

fn render_charts(aggregate: &str, source: &Path, out: &Path) -> Result<()> {
    let rows = parse_aggregate_csv(aggregate, source)?;
    write_file(out, RECOVERY_SVG, &recovery_chart(&rows))?;
    write_file(out, TIMING_SVG, &timing_chart(&rows))
}

pub fn cmd_plot(aggregate: &Path, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(aggregate).map_err(|e| Error::io(aggregate, e))?;
    render_charts(&text, aggregate, out)
}
