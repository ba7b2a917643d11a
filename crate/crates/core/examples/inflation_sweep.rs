//! Run one norm-inflation sweep at its default desk parameters and print the
//! table and fit.
//!
//! cargo run --release --example inflation_sweep -- subcritical

use roughwave::experiments::{run, Experiment, SweepConfig};

fn main() -> roughwave::Result<()> {
    let tag = std::env::args().nth(1).unwrap_or_else(|| "subcritical".into());
    let experiment: Experiment = serde_json::from_value(serde_json::Value::String(tag))?;
    let start = std::time::Instant::now();
    let report = run(&SweepConfig::for_experiment(experiment))?;
    print!("{}", report.to_csv());
    println!("{}", report.summary_json()?);
    eprintln!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
