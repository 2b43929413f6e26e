//! Recovery experiments from Fourier magnitudes.
//!
//! One trial draws a `K`-sparse signal supported in the leading half of the
//! index range, measures its (optionally noisy) Fourier magnitudes, runs the
//! configured method from `restarts` random initializations, keeps the
//! candidate with the smallest data residual, and scores it with
//! [`recovery_metric`]. A grid cell aggregates `trials` such trials into a
//! recovery probability and a median per-trial CPU time.

mod io;
mod metric;
pub mod rng;
mod signal;

use cpu_time::ThreadTime;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use io::{
    parse_aggregate_csv, write_aggregate_csv, write_trials_csv, write_trials_jsonl, AGGREGATE_COLUMNS,
    AGGREGATE_SCHEMA, TRIALS_COLUMNS, TRIALS_SCHEMA,
};
pub use metric::{circular_shift, invariance_orbit, recovery_metric, reversal};
pub use signal::{generate_measurements, generate_signal, noise_variance, noisy_squares, random_init, NoisySquares};

use crate::error::{Error, Result};
use crate::geometry::{MagnitudeSet, TorusProjector};
use crate::priors::{OrthoBasis, PriorSpec, Support};
use crate::solvers::{
    solve, truncate_topk, Backtracking, Inertia, Method, SolverConfig, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use rng::{stream, Purpose};

/// ℓ1 weight used for the alternating and inertial methods.
pub const DEFAULT_LAMBDA: f64 = 0.2;

/// λ values swept for the squared-magnitude baseline; the best cell is reported.
pub const WIRTINGER_LAMBDA_GRID: [f64; 9] = [1.0, 2.15, 4.64, 10.0, 21.5, 46.4, 100.0, 215.0, 464.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    Identity,
    Dct,
}

/// A prior described independently of the signal length and sparsity.
/// Support-aware kinds use the leading half `0..n/2`; sparsity kinds use `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorTemplate {
    None,
    L1 { lambda: f64 },
    L0TopK,
    SupportOnly,
    L1WithSupport { lambda: f64 },
    L0WithSupport,
    BasisL1 { lambda: f64, basis: BasisChoice },
}

impl PriorTemplate {
    pub fn instantiate(&self, n: usize, k: usize) -> Result<PriorSpec> {
        let half = || Support::leading_half(n);
        match *self {
            PriorTemplate::None => Ok(PriorSpec::None),
            PriorTemplate::L1 { lambda } => PriorSpec::l1(lambda),
            PriorTemplate::L0TopK => PriorSpec::l0_topk(k),
            PriorTemplate::SupportOnly => Ok(PriorSpec::support_only(half())),
            PriorTemplate::L1WithSupport { lambda } => PriorSpec::l1_with_support(lambda, half()),
            PriorTemplate::L0WithSupport => PriorSpec::l0_with_support(k, half()),
            PriorTemplate::BasisL1 { lambda, basis } => {
                let basis = match basis {
                    BasisChoice::Identity => OrthoBasis::identity(n),
                    BasisChoice::Dct => OrthoBasis::dct(n),
                };
                PriorSpec::basis_l1(lambda, basis)
            }
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match *self {
            PriorTemplate::L1 { lambda }
            | PriorTemplate::L1WithSupport { lambda }
            | PriorTemplate::BasisL1 { lambda, .. } => Some(lambda),
            _ => None,
        }
    }

    pub fn with_lambda(&self, value: f64) -> Result<PriorTemplate> {
        let mut out = self.clone();
        match &mut out {
            PriorTemplate::L1 { lambda }
            | PriorTemplate::L1WithSupport { lambda }
            | PriorTemplate::BasisL1 { lambda, .. } => {
                *lambda = value;
                Ok(out)
            }
            other => Err(Error::InvalidParameter(format!(
                "prior {other:?} has no lambda to sweep"
            ))),
        }
    }
}

/// A named method: solver, prior template and stopping parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub label: String,
    pub method: Method,
    pub prior: PriorTemplate,
    pub max_iters: usize,
    pub tol: f64,
    pub inertia: Inertia,
    pub step_rule: Backtracking,
    /// When nonempty, every λ is run and the best recovery probability kept.
    pub lambda_grid: Vec<f64>,
}

impl MethodSpec {
    pub fn new(label: impl Into<String>, method: Method, prior: PriorTemplate) -> Self {
        MethodSpec {
            label: label.into(),
            method,
            prior,
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            inertia: Inertia::default(),
            step_rule: Backtracking::default(),
            lambda_grid: Vec::new(),
        }
    }

    pub fn am_none() -> Self {
        MethodSpec::new("am", Method::Am, PriorTemplate::SupportOnly)
    }

    pub fn am_l1() -> Self {
        MethodSpec::new(
            "am_l1",
            Method::Am,
            PriorTemplate::L1WithSupport { lambda: DEFAULT_LAMBDA },
        )
    }

    pub fn am_l0() -> Self {
        MethodSpec::new("am_l0", Method::Am, PriorTemplate::L0WithSupport)
    }

    pub fn fistaph_l1() -> Self {
        MethodSpec::new(
            "fistaph_l1",
            Method::Fistaph,
            PriorTemplate::L1WithSupport { lambda: DEFAULT_LAMBDA },
        )
    }

    pub fn wirtinger_l1() -> Self {
        let mut spec = MethodSpec::new(
            "wirt_l1",
            Method::Mag2Pg,
            PriorTemplate::L1WithSupport {
                lambda: WIRTINGER_LAMBDA_GRID[0],
            },
        );
        spec.lambda_grid = WIRTINGER_LAMBDA_GRID.to_vec();
        spec
    }

    pub fn wirtinger_l0() -> Self {
        MethodSpec::new("wirt_l0", Method::Mag2Pg, PriorTemplate::L0WithSupport)
    }

    pub fn solver_config(&self, n: usize, k: usize) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            method: self.method,
            prior: self.prior.instantiate(n, k)?,
            max_iters: self.max_iters,
            tol: self.tol,
            inertia: self.inertia,
            step_rule: self.step_rule,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// How per-trial CPU time is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    /// Thread CPU time of the trial.
    #[default]
    Cpu,
    /// Recorded as zero, making every output a pure function of the config.
    Off,
}

/// One cell of an experiment grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub method: MethodSpec,
    pub n: usize,
    pub k: usize,
    /// `f64::INFINITY` for noiseless measurements.
    pub snr_db: f64,
    pub restarts: usize,
    pub trials: usize,
    pub seed: u64,
    /// Test hook: restart 0 starts from the ground truth.
    pub truth_init: bool,
    pub timing: Timing,
}

impl ExperimentConfig {
    pub fn new(method: MethodSpec, n: usize, k: usize, snr_db: f64, seed: u64) -> Self {
        ExperimentConfig {
            method,
            n,
            k,
            snr_db,
            restarts: 100,
            trials: 100,
            seed,
            truth_init: false,
            timing: Timing::Cpu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || 2 * self.k > self.n {
            return Err(Error::InvalidParameter(format!(
                "sparsity K = {} must lie in 1..=n/2 (n = {})",
                self.k, self.n
            )));
        }
        if self.restarts == 0 || self.trials == 0 {
            return Err(Error::InvalidParameter("restarts and trials must be at least 1".into()));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!("invalid SNR {} dB", self.snr_db)));
        }
        self.method.solver_config(self.n, self.k).map(|_| ())
    }

    pub fn support(&self) -> Support {
        Support::leading_half(self.n)
    }
}

/// Inputs and outcome of one recovery experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub method: String,
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
    pub lambda: Option<f64>,
    pub trial: usize,
    pub ground_truth: Vec<f64>,
    pub measurements: MagnitudeSet,
    pub best_estimate: Vec<f64>,
    pub best_restart: usize,
    pub best_residual: f64,
    pub recovery: u8,
    pub per_restart_residuals: Vec<f64>,
    pub per_restart_iterations: Vec<usize>,
    pub cpu_seconds: f64,
}

/// Ground truth and measurements of one trial; identical for every method.
pub fn trial_instance(cfg: &ExperimentConfig, trial_index: usize) -> Result<(Vec<f64>, MagnitudeSet)> {
    let t = trial_index as u64;
    let x0 = generate_signal(cfg.n, cfg.k, &mut stream(cfg.seed, Purpose::Signal, t, 0))?;
    let c = generate_measurements(&x0, cfg.snr_db, &mut stream(cfg.seed, Purpose::Noise, t, 0))?;
    Ok((x0, c))
}

/// Initial estimate for one restart of one trial.
pub fn restart_init(cfg: &ExperimentConfig, trial_index: usize, restart: usize) -> Result<Vec<f64>> {
    let mut rng = stream(cfg.seed, Purpose::Init, trial_index as u64, restart as u64);
    random_init(cfg.n, &cfg.support(), &mut rng)
}

pub fn run_trial(cfg: &ExperimentConfig, trial_index: usize) -> Result<TrialRecord> {
    cfg.validate()?;
    let started = ThreadTime::now();
    let solver = cfg.method.solver_config(cfg.n, cfg.k)?;
    let (x0, c) = trial_instance(cfg, trial_index)?;
    let projector = TorusProjector::new(c.clone());

    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    let mut residuals = Vec::with_capacity(cfg.restarts);
    let mut iterations = Vec::with_capacity(cfg.restarts);
    for restart in 0..cfg.restarts {
        let init = if cfg.truth_init && restart == 0 {
            x0.clone()
        } else {
            restart_init(cfg, trial_index, restart)?
        };
        let run = solve(&c, &solver, &init)?;
        let candidate = truncate_topk(&run.final_x, cfg.k)?;
        let residual = projector.residual(&candidate)?;
        residuals.push(residual);
        iterations.push(run.iterations);
        if best.as_ref().is_none_or(|(_, r, _)| residual < *r) {
            best = Some((restart, residual, candidate));
        }
    }
    let (best_restart, best_residual, best_estimate) = best.expect("restarts >= 1");
    let recovery = recovery_metric(&best_estimate, &x0)? as u8;
    let cpu_seconds = match cfg.timing {
        Timing::Cpu => started.elapsed().as_secs_f64(),
        Timing::Off => 0.0,
    };

    Ok(TrialRecord {
        method: cfg.method.label.clone(),
        n: cfg.n,
        k: cfg.k,
        snr_db: cfg.snr_db,
        lambda: cfg.method.prior.lambda(),
        trial: trial_index,
        ground_truth: x0,
        measurements: c,
        best_estimate,
        best_restart,
        best_residual,
        recovery,
        per_restart_residuals: residuals,
        per_restart_iterations: iterations,
        cpu_seconds,
    })
}

/// One row of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: String,
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
    pub lambda: Option<f64>,
    pub recovery_probability: f64,
    pub median_cpu_seconds: f64,
    pub trials: usize,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub rows: Vec<AggregateRow>,
    /// Trial records of every cell (for swept cells, of the winning λ), in grid order.
    pub trials: Vec<TrialRecord>,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

fn aggregate(cfg: &ExperimentConfig, records: &[TrialRecord]) -> AggregateRow {
    let recovered: usize = records.iter().map(|r| r.recovery as usize).sum();
    let times: Vec<f64> = records.iter().map(|r| r.cpu_seconds).collect();
    AggregateRow {
        method: cfg.method.label.clone(),
        n: cfg.n,
        k: cfg.k,
        snr_db: cfg.snr_db,
        lambda: cfg.method.prior.lambda(),
        recovery_probability: recovered as f64 / records.len() as f64,
        median_cpu_seconds: median(&times),
        trials: cfg.trials,
        restarts: cfg.restarts,
    }
}

/// Expands λ sweeps into concrete sub-cells.
fn expand(cfg: &ExperimentConfig) -> Result<Vec<ExperimentConfig>> {
    if cfg.method.lambda_grid.is_empty() {
        return Ok(vec![cfg.clone()]);
    }
    cfg.method
        .lambda_grid
        .iter()
        .map(|&lambda| {
            let mut sub = cfg.clone();
            sub.method.prior = cfg.method.prior.with_lambda(lambda)?;
            sub.method.lambda_grid.clear();
            Ok(sub)
        })
        .collect()
}

/// Runs every cell of `grid`, fanning trials out over `jobs` worker threads.
///
/// Results are identical to sequential execution: each trial owns its random
/// streams and outputs are collected in grid order.
pub fn run_grid(grid: &[ExperimentConfig], jobs: usize) -> Result<GridResult> {
    for cfg in grid {
        cfg.validate()?;
    }
    let cells: Vec<Vec<ExperimentConfig>> = grid.iter().map(expand).collect::<Result<_>>()?;
    let units: Vec<(usize, usize, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, subs)| {
            subs.iter()
                .enumerate()
                .flat_map(move |(s, sub)| (0..sub.trials).map(move |t| (c, s, t)))
        })
        .collect();

    let work = |&(c, s, t): &(usize, usize, usize)| run_trial(&cells[c][s], t);
    let records: Vec<TrialRecord> = if jobs <= 1 {
        units.iter().map(work).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
        pool.install(|| units.par_iter().map(work).collect::<Result<_>>())?
    };

    let mut rows = Vec::with_capacity(grid.len());
    let mut kept = Vec::new();
    let mut cursor = 0;
    for subs in &cells {
        let mut winner: Option<(AggregateRow, &[TrialRecord])> = None;
        for sub in subs {
            let slice = &records[cursor..cursor + sub.trials];
            cursor += sub.trials;
            let row = aggregate(sub, slice);
            if winner
                .as_ref()
                .is_none_or(|(w, _)| row.recovery_probability > w.recovery_probability)
            {
                winner = Some((row, slice));
            }
        }
        let (row, slice) = winner.expect("every cell has at least one sub-cell");
        rows.push(row);
        kept.extend_from_slice(slice);
    }
    Ok(GridResult { rows, trials: kept })
}
