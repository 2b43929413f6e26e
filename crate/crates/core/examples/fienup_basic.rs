//! Classical alternating projections (no prior) on a small noiseless instance,
//! then the same start with an l1 prior.

use phaseprox::geometry::MagnitudeSet;
use phaseprox::harness::recovery_metric;
use phaseprox::priors::PriorSpec;
use phaseprox::solvers::{fienup_am, truncate_topk, Method, SolverConfig};

fn main() -> phaseprox::Result<()> {
    let x0 = [
        0.0, 3.4, 0.0, 0.0, -3.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ];
    let m = MagnitudeSet::of_signal(&x0)?;
    let start = [
        0.3, 1.0, -0.5, 0.2, -1.0, 0.4, 0.1, -0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ];

    for (name, prior) in [("fienup", PriorSpec::None), ("am_l1", PriorSpec::l1(0.2)?)] {
        let run = fienup_am(&m, &SolverConfig::new(Method::Am, prior), &start)?;
        let estimate = truncate_topk(&run.final_x, 2)?;
        println!(
            "{name:>7}: {} iterations ({:?}), objective {:.3e} -> {:.3e}, residual {:.2e}, recovered {}",
            run.iterations,
            run.termination,
            run.initial_objective,
            run.final_objective(),
            run.residual,
            recovery_metric(&estimate, &x0)?
        );
    }
    Ok(())
}
