//! Iterative phase retrieval solvers.
//!
//! * [`fienup_am`]: alternating minimization `x <- prox_g(Re P(x))`. With no
//!   prior this is the classical Fienup / alternating projection method; with
//!   an ℓ1 prior it is AM-L1 and with a top-K prior AM-L0.
//! * [`fistaph`]: the same map driven through an inertial extrapolation.
//! * [`mag2_pg`]: proximal gradient on the squared-magnitude loss, a
//!   Wirtinger-type baseline.
//!
//! Convergence of the alternating scheme is only guaranteed for convex
//! priors. With the top-K prior the same stopping rule is used but nothing
//! is promised about the limit. The inertial variant has no convergence
//! guarantee at all and is capped by `max_iters`.

mod am;
mod fistaph;
mod mag2;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use am::fienup_am;
pub use fistaph::fistaph;
pub use mag2::{mag2_gradient, mag2_objective, mag2_pg, mag2_step, Mag2Step};

use crate::error::{Error, Result};
use crate::geometry::MagnitudeSet;
use crate::priors::{tie_break_topk, PriorSpec};
use crate::spectral::complexify;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Am,
    Fistaph,
    Mag2Pg,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Am => "am",
            Method::Fistaph => "fistaph",
            Method::Mag2Pg => "mag2_pg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "am" => Ok(Method::Am),
            "fistaph" => Ok(Method::Fistaph),
            "mag2_pg" => Ok(Method::Mag2Pg),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Rule producing the extrapolation weight `alpha^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Inertia {
    /// `alpha^k = (k - 1) / (k + 2)`, clamped to zero for `k < 1`.
    #[default]
    Fista,
    /// `alpha^k = 0`; the inertial solver then reproduces alternating minimization.
    Zero,
    Constant {
        alpha: f64,
    },
}

impl Inertia {
    pub fn weight(&self, k: usize) -> f64 {
        match *self {
            Inertia::Fista => {
                if k < 1 {
                    0.0
                } else {
                    (k as f64 - 1.0) / (k as f64 + 2.0)
                }
            }
            Inertia::Zero => 0.0,
            Inertia::Constant { alpha } => alpha,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Inertia::Constant { alpha } if !(0.0..1.0).contains(&alpha) => Err(Error::InvalidParameter(format!(
                "inertia weight {alpha} is outside [0, 1)"
            ))),
            _ => Ok(()),
        }
    }
}

/// Backtracking parameters for the proximal-gradient baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Backtracking {
    pub initial_step: f64,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    pub max_halvings: usize,
}

impl Default for Backtracking {
    fn default() -> Self {
        Backtracking {
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            max_halvings: 60,
        }
    }
}

impl Backtracking {
    fn validate(&self) -> Result<()> {
        let ok = self.initial_step > 0.0
            && self.initial_step.is_finite()
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.sufficient_decrease > 0.0
            && self.sufficient_decrease < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid backtracking rule {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    pub prior: PriorSpec,
    pub max_iters: usize,
    pub tol: f64,
    #[serde(default)]
    pub inertia: Inertia,
    #[serde(default)]
    pub step_rule: Backtracking,
}

impl SolverConfig {
    pub fn new(method: Method, prior: PriorSpec) -> Self {
        SolverConfig {
            method,
            prior,
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            inertia: Inertia::default(),
            step_rule: Backtracking::default(),
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_inertia(mut self, inertia: Inertia) -> Self {
        self.inertia = inertia;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        self.prior.validate()?;
        self.inertia.validate()?;
        self.step_rule.validate()
    }

    fn expect_method(&self, method: Method) -> Result<()> {
        self.validate()?;
        if self.method == method {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "config is for method `{}`, not `{}`",
                self.method, method
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceMet,
    MaxIters,
    /// Backtracking could not find an acceptable step.
    LineSearchStalled,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::ToleranceMet => "tolerance_met",
            Termination::MaxIters => "max_iters",
            Termination::LineSearchStalled => "line_search_stalled",
        })
    }
}

/// Outcome of one solver invocation.
///
/// `objective_trace[k]` is the objective at the estimate produced by
/// iteration `k + 1`, and `displacement_trace[k]` is the distance moved by
/// that iteration; `initial_objective` is the value at the starting estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    pub method: Method,
    pub final_x: Vec<f64>,
    pub iterations: usize,
    pub initial_objective: f64,
    pub objective_trace: Vec<f64>,
    pub displacement_trace: Vec<f64>,
    pub termination: Termination,
    /// `|| |dft(final_x)| - c ||^2`
    pub residual: f64,
    /// Final gradient-mapping norm (inertial solver only).
    pub gradient_mapping: Option<f64>,
}

impl SolverRun {
    pub fn final_objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(self.initial_objective)
    }
}

/// Runs the configured method from a real starting point. The inertial
/// solver starts from the projection of `x0` onto `Z_c`.
pub fn solve(m: &MagnitudeSet, cfg: &SolverConfig, x0: &[f64]) -> Result<SolverRun> {
    match cfg.method {
        Method::Am => fienup_am(m, cfg, x0),
        Method::Fistaph => fistaph(m, cfg, &complexify(x0)),
        Method::Mag2Pg => mag2_pg(m, cfg, x0),
    }
}

/// Keeps the `k` largest-magnitude entries of `x` (lowest index wins ties)
/// and zeroes the rest.
pub fn truncate_topk(x: &[f64], k: usize) -> Result<Vec<f64>> {
    let keep = tie_break_topk(x, k)?;
    let mut out = vec![0.0; x.len()];
    for i in keep {
        out[i] = x[i];
    }
    Ok(out)
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fista_schedule() {
        let a = Inertia::Fista;
        assert_eq!(a.weight(0), 0.0);
        assert_eq!(a.weight(1), 0.0);
        assert_eq!(a.weight(3), 0.4);
        assert_eq!(a.weight(8), 0.7);
        assert!((1..10_000).all(|k| (0.0..1.0).contains(&a.weight(k))));
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(
            truncate_topk(&[0.1, 3.0, -2.9, 0.05], 2).unwrap(),
            vec![0.0, 3.0, -2.9, 0.0]
        );
        assert_eq!(
            truncate_topk(&[0.0, 1.5, 0.0, -2.0], 2).unwrap(),
            vec![0.0, 1.5, 0.0, -2.0]
        );
        assert_eq!(truncate_topk(&[1.0, 1.0, 1.0], 1).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(truncate_topk(&[1.0], 2).is_err());
    }

    #[test]
    fn config_validation() {
        let base = SolverConfig::new(Method::Am, PriorSpec::None);
        assert!(base.validate().is_ok());
        assert!(base.clone().with_tol(0.0).validate().is_err());
        assert!(base.clone().with_max_iters(0).validate().is_err());
        assert!(base
            .clone()
            .with_inertia(Inertia::Constant { alpha: 1.0 })
            .validate()
            .is_err());
    }

    #[test]
    fn method_names_parse() {
        for m in [Method::Am, Method::Fistaph, Method::Mag2Pg] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
    }
}
