//! Runs the numerical self-check suite and prints one line per check.

fn main() -> phaseprox::Result<()> {
    let reports = phaseprox::verify::run_all()?;
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", reports.len());
    Ok(())
}
