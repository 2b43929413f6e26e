//! AM with a soft (l1) and a hard (top-K) sparsity prior from the same random
//! starts. Counts how often each recovers the signal up to the trivial
//! ambiguities (shift, reversal, sign).

use phaseprox::harness::rng::{stream, Purpose};
use phaseprox::harness::{generate_measurements, generate_signal, random_init, recovery_metric};
use phaseprox::priors::{PriorSpec, Support};
use phaseprox::solvers::{fienup_am, truncate_topk, Method, SolverConfig};

fn main() -> phaseprox::Result<()> {
    let (n, k, trials, restarts) = (48, 3, 20u64, 10u64);
    let support = Support::leading_half(n);
    let priors = [
        ("am_l1", PriorSpec::l1_with_support(0.2, support.clone())?),
        ("am_l0", PriorSpec::l0_with_support(k, support.clone())?),
    ];
    for (name, prior) in &priors {
        let cfg = SolverConfig::new(Method::Am, prior.clone());
        let mut recovered = 0;
        let mut iterations = 0;
        for t in 0..trials {
            let x0 = generate_signal(n, k, &mut stream(1, Purpose::Signal, t, 0))?;
            let m = generate_measurements(&x0, f64::INFINITY, &mut stream(1, Purpose::Noise, t, 0))?;
            let mut best = (f64::INFINITY, Vec::new());
            for r in 0..restarts {
                let init = random_init(n, &support, &mut stream(1, Purpose::Init, t, r))?;
                let run = fienup_am(&m, &cfg, &init)?;
                iterations += run.iterations;
                let candidate = truncate_topk(&run.final_x, k)?;
                let residual = phaseprox::geometry::TorusProjector::new(m.clone()).residual(&candidate)?;
                if residual < best.0 {
                    best = (residual, candidate);
                }
            }
            recovered += usize::from(recovery_metric(&best.1, &x0)?);
        }
        println!(
            "{name}: recovered {recovered}/{trials}, mean iterations per restart {:.0}",
            iterations as f64 / (trials * restarts) as f64
        );
    }
    Ok(())
}
