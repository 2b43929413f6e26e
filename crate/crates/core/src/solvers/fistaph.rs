use crate::error::{check_len, Result};
use crate::geometry::{MagnitudeSet, TorusProjector};
use crate::spectral::Complex64;

use super::{distance, Method, SolverConfig, SolverRun, Termination};

/// Inertial alternating minimization.
///
/// Starting from `z^0 = P(z0)` and `y^0 = z^0`:
///
/// ```text
/// z^{k+1} = P_{Z_c}(prox_g(Re y^k))
/// y^{k+1} = z^{k+1} + alpha^{k+1} (z^{k+1} - z^k)
/// ```
///
/// The estimate reported for iterate `z^k` is `prox_g(Re z^k)`. Stops when
/// the gradient-mapping norm at the extrapolated point, `||y^k - z^{k+1}||`,
/// falls below `cfg.tol`, or after `cfg.max_iters` iterations. Requires a
/// convex prior.
pub fn fistaph(m: &MagnitudeSet, cfg: &SolverConfig, z0: &[Complex64]) -> Result<SolverRun> {
    cfg.expect_method(Method::Fistaph)?;
    cfg.prior.require_convex()?;
    check_len(m.len(), z0.len())?;
    cfg.prior.check_dimension(z0.len())?;

    let projector = TorusProjector::new(m.clone());
    let plan = projector.plan();
    let prior = &cfg.prior;

    let mut z = projector.project(z0)?;
    let mut estimate = real_prox(prior, &z)?;
    let mut estimate_spectrum = spectrum_of(plan, &estimate);
    let initial_objective = projector.misfit_of_spectrum(&estimate_spectrum) + prior.evaluate(&estimate)?;

    // y^0 = z^0, so the first step reuses prox(Re z^0) and its spectrum
    let mut y: Option<Vec<Complex64>> = None;
    let mut objective_trace = Vec::new();
    let mut displacement_trace = Vec::new();
    let mut termination = Termination::MaxIters;
    let mut mapping = f64::INFINITY;

    for k in 0..cfg.max_iters {
        let mut buf = match &y {
            None => estimate_spectrum.clone(),
            Some(y) => spectrum_of(plan, &real_prox(prior, y)?),
        };
        projector.project_spectrum_in_place(&mut buf);
        let z_next = buf;

        mapping = split_distance(y.as_deref().unwrap_or(&z), &z_next);

        let next_estimate = real_prox(prior, &z_next)?;
        estimate_spectrum = spectrum_of(plan, &next_estimate);
        let objective = projector.misfit_of_spectrum(&estimate_spectrum) + prior.evaluate(&next_estimate)?;
        displacement_trace.push(distance(&next_estimate, &estimate));
        objective_trace.push(objective);
        estimate = next_estimate;

        let alpha = cfg.inertia.weight(k + 1);
        y = if alpha == 0.0 {
            None
        } else {
            Some(
                z_next
                    .iter()
                    .zip(&z)
                    .map(|(&now, &before)| now + (now - before) * alpha)
                    .collect(),
            )
        };
        z = z_next;

        if mapping < cfg.tol {
            termination = Termination::ToleranceMet;
            break;
        }
    }

    let residual = 2.0 * m.len() as f64 * projector.misfit_of_spectrum(&estimate_spectrum);
    Ok(SolverRun {
        method: Method::Fistaph,
        final_x: estimate,
        iterations: objective_trace.len(),
        initial_objective,
        objective_trace,
        displacement_trace,
        termination,
        residual,
        gradient_mapping: Some(mapping),
    })
}

fn real_prox(prior: &crate::priors::PriorSpec, z: &[Complex64]) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = z.iter().map(|c| c.re).collect();
    prior.prox_in_place(&mut v)?;
    Ok(v)
}

fn spectrum_of(plan: &crate::spectral::FourierPlan, x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan.forward_in_place(&mut buf);
    buf
}

fn split_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
