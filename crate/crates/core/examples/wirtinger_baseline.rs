//! Proximal gradient on the squared-magnitude loss, with a small lambda sweep
//! and a look at the backtracking step sizes.

use phaseprox::harness::rng::{stream, Purpose};
use phaseprox::harness::{generate_measurements, generate_signal, random_init, recovery_metric};
use phaseprox::priors::{PriorSpec, Support};
use phaseprox::solvers::{mag2_pg, mag2_step, truncate_topk, Backtracking, Method, SolverConfig};

fn main() -> phaseprox::Result<()> {
    let (n, k) = (32, 2);
    let support = Support::leading_half(n);
    let x0 = generate_signal(n, k, &mut stream(4, Purpose::Signal, 0, 0))?;
    let m = generate_measurements(&x0, f64::INFINITY, &mut stream(4, Purpose::Noise, 0, 0))?;
    let init = random_init(n, &support, &mut stream(4, Purpose::Init, 0, 0))?;

    let step = mag2_step(&m, &PriorSpec::None, &Backtracking::default(), &init)?;
    println!(
        "first step: t = {:.3e}, loss {:.3e} -> {:.3e}",
        step.step, step.loss_before, step.loss_after
    );

    for lambda in [0.0, 1.0, 10.0] {
        let prior = PriorSpec::l1_with_support(lambda, support.clone())?;
        let run = mag2_pg(&m, &SolverConfig::new(Method::Mag2Pg, prior), &init)?;
        let estimate = truncate_topk(&run.final_x, k)?;
        println!(
            "lambda {lambda:>4}: {:>4} iterations ({:?}), residual {:.2e}, recovered {}",
            run.iterations,
            run.termination,
            run.residual,
            recovery_metric(&estimate, &x0)?
        );
    }
    Ok(())
}
