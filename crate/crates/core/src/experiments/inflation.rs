use super::{Experiment, Report, SweepConfig};
use crate::duhamel::radial::RadialDuhamel;
use crate::duhamel::separable::SeparableDuhamel;
use crate::duhamel::{duhamel_kernel_apply, lower_bound_from, phase_min_check, Region};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::norms::{fit_power_law, sobolev_norm};
use crate::potentials::{
    aniso_box_potential, aniso_box_profile, box_data, box_profile, bump_profile, inner_factor,
    log_shell_profile, outer_factor, shell_profile, Band, RadialProfile,
};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Gauss–Legendre nodes in time for the separable path.
const SEPARABLE_ORDER: usize = 24;
/// Radii sampled for the minimum of `Re Â` on a shell.
const SHELL_SAMPLES: usize = 33;

/// One sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InflationPoint {
    pub sweep_value: f64,
    pub t: f64,
    pub full_norm: f64,
    pub omega_norm: f64,
    pub min_re: f64,
    pub sin_min: f64,
}

impl InflationPoint {
    fn row(&self) -> Vec<f64> {
        vec![self.sweep_value, self.t, self.full_norm, self.omega_norm, self.min_re, self.sin_min]
    }
}

/// The potential scale `M`, the data parameters and `Ω` of one radial sweep
/// point.
struct RadialSetup {
    m: f64,
    eta: RadialProfile,
    data: RadialProfile,
    gamma: f64,
}

fn radial_setup(cfg: &SweepConfig, x: f64) -> Result<RadialSetup> {
    let d = cfg.dim_or_err()?;
    let df = d as f64;
    let band = cfg.band.unwrap_or(Band::HalfToTwo);
    let need = SweepConfig::need;
    Ok(match cfg.experiment.unwrap() {
        Experiment::Supercritical | Experiment::Exploratory => {
            let (r, gamma) = (need(&cfg.r, "r")?, need(&cfg.gamma, "gamma")?);
            let m = need(&cfg.k0, "k0")? * x;
            RadialSetup {
                m,
                eta: bump_profile(d, m, r, band),
                data: shell_profile(d, x, gamma),
                gamma,
            }
        }
        Experiment::Subcritical => {
            let (r, gamma) = (need(&cfg.r, "r")?, need(&cfg.gamma, "gamma")?);
            let n = need(&cfg.scale, "scale")?;
            RadialSetup {
                m: x,
                eta: bump_profile(d, x, r, band),
                data: shell_profile(d, n, gamma),
                gamma,
            }
        }
        Experiment::CriticalLog => RadialSetup {
            m: x,
            eta: bump_profile(d, x, df / 2.0, band),
            data: log_shell_profile(d, x),
            gamma: cfg.gamma.unwrap_or(df / 2.0),
        },
        other => return Err(Error::Config(format!("{other:?} is not a radial sweep"))),
    })
}

fn radial_point(cfg: &SweepConfig, x: f64) -> Result<InflationPoint> {
    let s = radial_setup(cfg, x)?;
    let d = cfg.dim_or_err()?;
    let t = 1.0 / (s.m * s.m);
    let (lo, hi) = (inner_factor() * s.m, outer_factor() * s.m);
    if let Some(n) = cfg.grid_n {
        let grid = Grid::new(d, n, cfg.period.unwrap_or(2.0 * PI))?;
        let eta = crate::potentials::Potential::from_field(s.eta.to_field(&grid)?, eta_exponent(cfg)?);
        let u0 = s.data.to_field(&grid)?;
        let (din, dout) = s.data.support();
        return lattice_point(&eta, &u0, x, t, s.gamma, &Region::Shell { inner: lo, outer: hi }, &Region::Shell {
            inner: din,
            outer: dout,
        });
    }
    let a = RadialDuhamel::new(d, s.eta, s.data, t)?;
    Ok(InflationPoint {
        sweep_value: x,
        t,
        full_norm: a.sobolev_norm(s.gamma),
        omega_norm: a.real_part_norm_between(lo, hi, s.gamma),
        min_re: a.min_real_part(lo, hi, SHELL_SAMPLES),
        sin_min: a.phase_min(lo, hi),
    })
}

fn eta_exponent(cfg: &SweepConfig) -> Result<f64> {
    if cfg.experiment == Some(Experiment::CriticalLog) {
        Ok(cfg.dim_or_err()? as f64 / 2.0)
    } else {
        SweepConfig::need(&cfg.r, "r")
    }
}

fn lattice_point(
    eta: &crate::potentials::Potential,
    u0: &Field,
    x: f64,
    t: f64,
    gamma: f64,
    omega: &Region,
    data: &Region,
) -> Result<InflationPoint> {
    let a = duhamel_kernel_apply(eta, u0, t)?;
    let pts = omega.lattice_points(u0.grid());
    if pts.is_empty() {
        return Err(Error::EmptyRegion(format!("{omega:?} has no lattice points")));
    }
    let lb = lower_bound_from(&a, &pts, gamma);
    Ok(InflationPoint {
        sweep_value: x,
        t,
        full_norm: sobolev_norm(&a, gamma),
        omega_norm: lb.norm_on_omega,
        min_re: lb.min_re,
        sin_min: phase_min_check(omega, data, t)?,
    })
}

/// `Ω` of the box construction: `√(π/3)M + N/4 ≤ ξ₁ ≤ √(π/3)M + 3N/4` and
/// `3N/4 ≤ ξ_i ≤ 7N/4` on the other axes.
fn box_omega(d: usize, m: f64, n: f64) -> (Vec<f64>, Vec<f64>) {
    let start = inner_factor() * m;
    let mut lo = vec![start + n / 4.0];
    let mut hi = vec![start + 0.75 * n];
    lo.extend(std::iter::repeat(0.75 * n).take(d - 1));
    hi.extend(std::iter::repeat(1.75 * n).take(d - 1));
    (lo, hi)
}

fn box_point(cfg: &SweepConfig, m: f64) -> Result<InflationPoint> {
    let need = SweepConfig::need;
    let d = cfg.dim_or_err()?;
    let (r, gamma) = (need(&cfg.r, "r")?, need(&cfg.gamma, "gamma")?);
    let n = need(&cfg.scale, "scale")?;
    let lp = need(&cfg.data_scale, "data_scale")?;
    let t = 1.0 / (m * m);
    let (lo, hi) = box_omega(d, m, n);
    let omega = Region::SignedBox { lo: lo.clone(), hi: hi.clone() };
    let data_region = Region::AbsBox {
        lo: vec![(lp / 2.0 - 0.25).max(0.0); d],
        hi: vec![2.0 * lp + 0.25; d],
    };
    if let Some(gn) = cfg.grid_n {
        let grid = Grid::new(d, gn, cfg.period.unwrap_or(2.0 * PI))?;
        let eta = aniso_box_potential(&grid, m, n, r)?;
        let u0 = box_data(&grid, lp, gamma)?;
        return lattice_point(&eta, &u0, m, t, gamma, &omega, &data_region);
    }
    let step = need(&cfg.step, "step")?;
    let a = SeparableDuhamel::new(&aniso_box_profile(d, m, n, r), &box_profile(d, lp, gamma), t, step, SEPARABLE_ORDER)?;
    let lb = a.lower_bound(&lo, &hi, gamma)?;
    Ok(InflationPoint {
        sweep_value: m,
        t,
        full_norm: a.sobolev_norm(gamma),
        omega_norm: lb.norm_on_omega,
        min_re: lb.min_re,
        sin_min: phase_min_check(&omega, &data_region, t)?,
    })
}

/// Evaluate `A(u₀)(1/M²)` along the sweep, fit `full_norm` against the swept
/// scale and record the tag's checks.
pub fn run_inflation_sweep(cfg: &SweepConfig) -> Result<Report> {
    let cfg = cfg.resolved()?;
    let e = cfg.experiment.unwrap();
    if !e.is_inflation() {
        return Err(Error::Config(format!("{e:?} is not an inflation sweep")));
    }
    let sweep = SweepConfig::need(&cfg.sweep, "sweep")?;
    let points: Vec<InflationPoint> = sweep
        .par_iter()
        .map(|&x| if e == Experiment::AnisoH2plus { box_point(&cfg, x) } else { radial_point(&cfg, x) })
        .collect::<Result<_>>()?;

    let mut header = vec!["sweep_value", "t", "full_norm", "omega_norm", "min_re", "sin_min"];
    if e == Experiment::CriticalLog {
        header.push("ln_ln_m");
    }
    let mut report = Report::new(e, &header);
    for p in &points {
        let mut row = p.row();
        if e == Experiment::CriticalLog {
            row.push(p.sweep_value.ln().ln());
        }
        report.rows.push(row);
    }
    let min_re = points.iter().map(|p| p.min_re).fold(f64::INFINITY, f64::min);
    let sin_min = points.iter().map(|p| p.sin_min).fold(f64::INFINITY, f64::min);
    report.value("min_re", min_re);
    report.value("sin_min", sin_min);

    if e == Experiment::CriticalLog {
        let monotone = points.windows(2).all(|w| w[1].full_norm > w[0].full_norm);
        report.check("monotone", monotone);
        report.check("positive_on_omega", min_re > 0.0);
        return Ok(report);
    }

    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.sweep_value, p.full_norm)).collect();
    let mut fit = fit_power_law(&samples)?;
    if let Some(expected) = cfg.expected_slope {
        fit = fit.with_expected(expected);
    }
    report.value("slope", fit.slope);
    report.value("r_squared", fit.r_squared);
    if e != Experiment::Exploratory {
        let tol = cfg.tolerance.unwrap_or(0.15);
        report.check("slope", fit.abs_error.is_some_and(|err| err <= tol));
        report.check("r_squared", fit.r_squared >= 0.98);
    }
    if e == Experiment::Supercritical {
        report.check("positive_on_omega", min_re > 0.0);
        report.check("phase_quarter", sin_min >= 0.25);
    }
    report.fit = Some(fit);
    Ok(report)
}
