use crate::error::{check_len, Result};
use crate::geometry::{MagnitudeSet, TorusProjector};
use crate::priors::PriorSpec;
use crate::spectral::{complexify, Complex64, FourierPlan};

use super::{distance, Backtracking, Method, SolverConfig, SolverRun, Termination};

/// Squared-magnitude loss `f(x) = (1/4n) || |dft(x)|^2 - c^2 ||^2`.
pub fn mag2_objective(m: &MagnitudeSet, x: &[f64]) -> Result<f64> {
    check_len(m.len(), x.len())?;
    let plan = FourierPlan::new(x.len());
    let spectrum = plan.forward_real(x)?;
    Ok(loss_of_spectrum(m, &spectrum))
}

/// `grad f(x) = Re idft((|X|^2 - c^2) X)` with `X = dft(x)`.
pub fn mag2_gradient(m: &MagnitudeSet, x: &[f64]) -> Result<Vec<f64>> {
    check_len(m.len(), x.len())?;
    let plan = FourierPlan::new(x.len());
    let spectrum = plan.forward_real(x)?;
    Ok(gradient_of_spectrum(&plan, m, &spectrum))
}

fn loss_of_spectrum(m: &MagnitudeSet, spectrum: &[Complex64]) -> f64 {
    let n = m.len() as f64;
    spectrum
        .iter()
        .zip(m.values())
        .map(|(v, c)| (v.norm_sqr() - c * c).powi(2))
        .sum::<f64>()
        / (4.0 * n)
}

fn gradient_of_spectrum(plan: &FourierPlan, m: &MagnitudeSet, spectrum: &[Complex64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .zip(m.values())
        .map(|(v, c)| v * (v.norm_sqr() - c * c))
        .collect();
    plan.inverse_in_place(&mut buf);
    buf.iter().map(|v| v.re).collect()
}

/// One accepted proximal-gradient step.
#[derive(Debug, Clone, PartialEq)]
pub struct Mag2Step {
    pub next: Vec<f64>,
    pub step: f64,
    /// Smooth loss at the starting point and at `next`.
    pub loss_before: f64,
    pub loss_after: f64,
    pub objective_before: f64,
    pub objective_after: f64,
    /// `|| (x - next) / step ||^2`
    pub mapping_norm_sq: f64,
    pub accepted: bool,
}

/// Backtracking proximal-gradient step from `x`.
///
/// The trial point is `x+ = prox_{t g}(x - t grad f(x))`, accepted once
/// `f(x+) + g(x+) <= f(x) + g(x) - sigma t ||(x - x+)/t||^2`. For `g = 0`
/// this is the Armijo rule `f(x+) <= f(x) - sigma t ||grad f(x)||^2`.
pub fn mag2_step(m: &MagnitudeSet, prior: &PriorSpec, rule: &Backtracking, x: &[f64]) -> Result<Mag2Step> {
    check_len(m.len(), x.len())?;
    let projector = TorusProjector::new(m.clone());
    step_with(projector.plan(), m, prior, rule, x)
}

fn step_with(
    plan: &FourierPlan,
    m: &MagnitudeSet,
    prior: &PriorSpec,
    rule: &Backtracking,
    x: &[f64],
) -> Result<Mag2Step> {
    let mut spectrum = complexify(x);
    plan.forward_in_place(&mut spectrum);
    let loss_before = loss_of_spectrum(m, &spectrum);
    let objective_before = loss_before + prior.evaluate(x)?;
    let grad = gradient_of_spectrum(plan, m, &spectrum);

    let mut step = rule.initial_step;
    let mut last = None;
    for _ in 0..=rule.max_halvings {
        let mut trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
        prior.scaled(step)?.prox_in_place(&mut trial)?;
        let mut trial_spectrum = complexify(&trial);
        plan.forward_in_place(&mut trial_spectrum);
        let loss_after = loss_of_spectrum(m, &trial_spectrum);
        let objective_after = loss_after + prior.evaluate(&trial)?;
        let mapping_norm_sq = distance(x, &trial).powi(2) / (step * step);
        let accepted = objective_after <= objective_before - rule.sufficient_decrease * step * mapping_norm_sq;
        let candidate = Mag2Step {
            next: trial,
            step,
            loss_before,
            loss_after,
            objective_before,
            objective_after,
            mapping_norm_sq,
            accepted,
        };
        if accepted {
            return Ok(candidate);
        }
        last = Some(candidate);
        step *= rule.shrink;
    }
    Ok(last.expect("at least one trial step"))
}

/// Proximal gradient descent on `f + g` with backtracking. Stops when two
/// successive objective values differ by less than `cfg.tol`.
pub fn mag2_pg(m: &MagnitudeSet, cfg: &SolverConfig, x0: &[f64]) -> Result<SolverRun> {
    cfg.expect_method(Method::Mag2Pg)?;
    check_len(m.len(), x0.len())?;
    cfg.prior.check_dimension(x0.len())?;

    let plan = FourierPlan::new(m.len());
    let mut x = x0.to_vec();
    let mut objective_trace = Vec::new();
    let mut displacement_trace = Vec::new();
    let mut termination = Termination::MaxIters;
    let mut initial_objective = None;

    for _ in 0..cfg.max_iters {
        let step = step_with(&plan, m, &cfg.prior, &cfg.step_rule, &x)?;
        initial_objective.get_or_insert(step.objective_before);
        if !step.accepted {
            termination = Termination::LineSearchStalled;
            break;
        }
        displacement_trace.push(distance(&step.next, &x));
        objective_trace.push(step.objective_after);
        x = step.next;
        if (step.objective_before - step.objective_after).abs() < cfg.tol {
            termination = Termination::ToleranceMet;
            break;
        }
    }

    let residual = TorusProjector::new(m.clone()).residual(&x)?;
    Ok(SolverRun {
        method: Method::Mag2Pg,
        final_x: x,
        iterations: objective_trace.len(),
        initial_objective: initial_objective.unwrap_or(f64::NAN),
        objective_trace,
        displacement_trace,
        termination,
        residual,
        gradient_mapping: None,
    })
}
