//! Normal-form and cascade identity residuals under time refinement.
//!
//! cargo run --release --example identities

use roughwave::experiments::{run, Experiment, SweepConfig};

fn main() -> roughwave::Result<()> {
    let report = run(&SweepConfig::for_experiment(Experiment::IdentitySuite))?;
    print!("{}", report.to_csv());
    for (name, v) in &report.values {
        println!("{name} {v:.3e}");
    }
    Ok(())
}
