//! Batch experiments: norm-inflation sweeps with exponent fits, Picard series
//! convergence, identity residual suites, regularity probes, Strichartz ratio
//! tests and plain solves. Each run produces a [`Report`] that serializes to
//! `results.csv` and `summary.json`.

mod config;
mod inflation;
mod studies;

pub use config::{Experiment, PotentialKind, SweepConfig};
pub use inflation::{run_inflation_sweep, InflationPoint};
pub use studies::{
    run_identity_suite, run_regularity_probe, run_series_convergence, run_solve, run_strichartz, strichartz_ratio,
};

use crate::error::Result;
use crate::norms::FitResult;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Tabular output plus a JSON summary.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: Experiment,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fit: Option<FitResult>,
    /// Named pass/fail checks.
    pub checks: BTreeMap<String, bool>,
    /// Named scalar results.
    pub values: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(experiment: Experiment, header: &[&str]) -> Self {
        Self {
            experiment,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            fit: None,
            checks: BTreeMap::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
    }

    pub fn value(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }

    /// Column `name` of the table.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// CSV text; floats are written in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:?}");
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            experiment: Experiment,
            passed: bool,
            fit: &'a Option<FitResult>,
            checks: &'a BTreeMap<String, bool>,
            values: &'a BTreeMap<String, f64>,
        }
        Ok(serde_json::to_string_pretty(&Summary {
            experiment: self.experiment,
            passed: self.passed(),
            fit: &self.fit,
            checks: &self.checks,
            values: &self.values,
        })?)
    }

    /// Write `results.csv` and `summary.json` into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("results.csv"), self.to_csv())?;
        std::fs::write(dir.join("summary.json"), self.summary_json()?)?;
        Ok(())
    }
}

/// Run whichever experiment the configuration names.
pub fn run(cfg: &SweepConfig) -> Result<Report> {
    let cfg = cfg.resolved()?;
    match cfg.experiment.unwrap() {
        Experiment::Supercritical
        | Experiment::Subcritical
        | Experiment::CriticalLog
        | Experiment::AnisoH2plus
        | Experiment::Exploratory => run_inflation_sweep(&cfg),
        Experiment::SeriesConvergence => run_series_convergence(&cfg),
        Experiment::IdentitySuite => run_identity_suite(&cfg),
        Experiment::RegularityProbe => run_regularity_probe(&cfg),
        Experiment::Strichartz => run_strichartz(&cfg),
        Experiment::Solve => run_solve(&cfg),
    }
}

#[cfg(test)]
mod tests;
