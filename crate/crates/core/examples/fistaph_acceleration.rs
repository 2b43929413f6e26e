//! Inertial AM versus plain AM on the same instance: iterations to reach the
//! gradient-mapping tolerance, and the objective along the way.

use phaseprox::harness::rng::{stream, Purpose};
use phaseprox::harness::{generate_measurements, generate_signal, random_init};
use phaseprox::priors::{PriorSpec, Support};
use phaseprox::solvers::{fistaph, Inertia, Method, SolverConfig};
use phaseprox::spectral::complexify;

fn main() -> phaseprox::Result<()> {
    let n = 64;
    let support = Support::leading_half(n);
    let prior = PriorSpec::l1_with_support(0.2, support.clone())?;
    for t in 0..5u64 {
        let x0 = generate_signal(n, 3, &mut stream(3, Purpose::Signal, t, 0))?;
        let m = generate_measurements(&x0, f64::INFINITY, &mut stream(3, Purpose::Noise, t, 0))?;
        let init = complexify(&random_init(n, &support, &mut stream(3, Purpose::Init, t, 0))?);
        let mut line = format!("instance {t}:");
        for (name, inertia) in [("plain", Inertia::Zero), ("inertial", Inertia::Fista)] {
            let cfg = SolverConfig::new(Method::Fistaph, prior.clone()).with_inertia(inertia);
            let run = fistaph(&m, &cfg, &init)?;
            line += &format!(
                "  {name} {:>4} it, F={:.3e}, mapping {:.1e}",
                run.iterations,
                run.final_objective(),
                run.gradient_mapping.unwrap_or(f64::NAN)
            );
        }
        println!("{line}");
    }
    Ok(())
}
