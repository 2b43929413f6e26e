//! A small recovery-probability sweep over sparsity for three methods, written
//! as an aggregate table and an SVG chart under `target/recovery_benchmark/`.

use phaseprox::harness::{run_grid, ExperimentConfig, MethodSpec};
use phaseprox::report::recovery_chart;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let methods = [MethodSpec::fistaph_l1(), MethodSpec::am_l1(), MethodSpec::am_l0()];
    let mut grid = Vec::new();
    for method in &methods {
        for k in 2..=6 {
            let mut cfg = ExperimentConfig::new(method.clone(), 48, k, f64::INFINITY, 2024);
            cfg.trials = 10;
            cfg.restarts = 10;
            grid.push(cfg);
        }
    }
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let result = run_grid(&grid, jobs)?;

    println!("{:<12} {:>3} {:>9} {:>12}", "method", "K", "recovery", "median cpu");
    for row in &result.rows {
        println!(
            "{:<12} {:>3} {:>9.2} {:>11.4}s",
            row.method, row.k, row.recovery_probability, row.median_cpu_seconds
        );
    }
    let out = std::path::Path::new("target/recovery_benchmark");
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("recovery.svg"), recovery_chart(&result.rows))?;
    println!("chart written to {}", out.join("recovery.svg").display());
    Ok(())
}
