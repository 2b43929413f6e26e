use crate::error::{check_len, Result};
use crate::geometry::{MagnitudeSet, TorusProjector};
use crate::spectral::{complexify, Complex64};

use super::{distance, Method, SolverConfig, SolverRun, Termination};

/// Alternating minimization `x^{k+1} = prox_g(Re P_{Z_c}(x^k))`.
///
/// Stops once two successive objective values differ by less than
/// `cfg.tol`, or after `cfg.max_iters` iterations. Works with any prior;
/// for nonconvex priors the hard threshold keeps the lowest-index entries
/// among ties.
pub fn fienup_am(m: &MagnitudeSet, cfg: &SolverConfig, x0: &[f64]) -> Result<SolverRun> {
    cfg.expect_method(Method::Am)?;
    check_len(m.len(), x0.len())?;
    cfg.prior.check_dimension(x0.len())?;

    let projector = TorusProjector::new(m.clone());
    let prior = &cfg.prior;
    let plan = projector.plan();

    let mut x = x0.to_vec();
    let mut buf = complexify(&x);
    plan.forward_in_place(&mut buf);
    let initial_objective = projector.misfit_of_spectrum(&buf) + prior.evaluate(&x)?;

    let mut current = initial_objective;
    let mut objective_trace = Vec::new();
    let mut displacement_trace = Vec::new();
    let mut termination = Termination::MaxIters;

    for _ in 0..cfg.max_iters {
        // buf holds dft(x^k); turn it into z^{k+1} = P(x^k)
        projector.project_spectrum_in_place(&mut buf);
        let mut next: Vec<f64> = buf.iter().map(|v| v.re).collect();
        prior.prox_in_place(&mut next)?;

        for (slot, &v) in buf.iter_mut().zip(&next) {
            *slot = Complex64::new(v, 0.0);
        }
        plan.forward_in_place(&mut buf);
        let objective = projector.misfit_of_spectrum(&buf) + prior.evaluate(&next)?;

        displacement_trace.push(distance(&next, &x));
        objective_trace.push(objective);
        x = next;

        if (current - objective).abs() < cfg.tol {
            termination = Termination::ToleranceMet;
            break;
        }
        current = objective;
    }

    let residual = 2.0 * m.len() as f64 * projector.misfit_of_spectrum(&buf);
    Ok(SolverRun {
        method: Method::Am,
        final_x: x,
        iterations: objective_trace.len(),
        initial_objective,
        objective_trace,
        displacement_trace,
        termination,
        residual,
        gradient_mapping: None,
    })
}
