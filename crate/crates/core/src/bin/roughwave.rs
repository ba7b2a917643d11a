//! Command-line front end for the experiment runners.

use clap::{Parser, Subcommand};
use roughwave::experiments::{self, Experiment, Report, SweepConfig};
use roughwave::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "roughwave", version, about = "Norm-inflation sweeps, series and identity checks for rough-potential Schrödinger flows")]
struct Cli {
    /// JSON experiment configuration; unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for results.csv and summary.json.
    #[arg(long, global = true, default_value = "roughwave-out")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm-inflation sweep with a power-law fit.
    Inflate {
        /// Sweep tag when no config file names one.
        #[arg(long, default_value = "supercritical")]
        experiment: String,
    },
    /// Picard series convergence against the dense propagator.
    Converge,
    /// Normal-form and cascade identity residuals under time refinement.
    Identities,
    /// Sobolev tails of evolved data on two lattices.
    Probe,
    /// Strichartz ratios over random band-limited data.
    Strichartz,
    /// Plain evolution with mass and oracle diagnostics.
    Solve,
}

fn load_config(cli: &Cli) -> Result<SweepConfig> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };
    let wanted = match &cli.command {
        Command::Inflate { experiment } => {
            let tag: Experiment = serde_json::from_value(serde_json::Value::String(experiment.clone()))
                .map_err(|e| Error::Config(format!("experiment `{experiment}`: {e}")))?;
            let e = cfg.experiment.unwrap_or(tag);
            if !e.is_inflation() {
                return Err(Error::Config(format!("`inflate` cannot run a {e:?} configuration")));
            }
            e
        }
        Command::Converge => Experiment::SeriesConvergence,
        Command::Identities => Experiment::IdentitySuite,
        Command::Probe => Experiment::RegularityProbe,
        Command::Strichartz => Experiment::Strichartz,
        Command::Solve => Experiment::Solve,
    };
    if let Some(e) = cfg.experiment {
        if e != wanted {
            return Err(Error::Config(format!("configuration names {e:?}, subcommand runs {wanted:?}")));
        }
    }
    cfg.experiment = Some(wanted);
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Report> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let cfg = load_config(cli)?;
    let report = experiments::run(&cfg)?;
    report.write_to(&cli.out)?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(report) => {
            for (name, ok) in &report.checks {
                println!("{:<32} {}", name, if *ok { "pass" } else { "FAIL" });
            }
            if let Some(fit) = &report.fit {
                println!("slope {:.4} (expected {:?}), r² {:.4}", fit.slope, fit.expected_slope, fit.r_squared);
            }
            println!("wrote {}", cli.out.display());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
