//! Sobolev, Lebesgue and space-time norms, admissible pairs and power-law fits.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Trajectory};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `(L⁻ᵈ Σ_ξ ⟨ξ⟩^{2s} |û(ξ)|²)^{1/2}`.
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    let g = f.grid();
    let sum: f64 = if s == 0.0 {
        f.coeffs().iter().map(|c| c.norm_sqr()).sum()
    } else {
        f.coeffs()
            .par_iter()
            .enumerate()
            .map(|(i, c)| (1.0 + g.freq_sq(i)).powf(s) * c.norm_sqr())
            .sum()
    };
    (sum / g.volume()).sqrt()
}

/// Uniform Riemann sum `((L/n)ᵈ Σ_x vᵖ)^{1/p}` of nonnegative samples, or their
/// maximum for `p = ∞`.
pub fn lebesgue_quadrature(grid: &Grid, values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, f64::max);
    }
    let sum: f64 = if p == 2.0 {
        values.map(|v| v * v).sum()
    } else if p == 1.0 {
        values.sum()
    } else {
        values.map(|v| v.powf(p)).sum()
    };
    (grid.cell_volume() * sum).powf(1.0 / p)
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("Lebesgue exponent {p} below 1")))
    }
}

/// Physical-space `L^p` norm by uniform quadrature.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let samples = f.synthesize();
    Ok(lebesgue_quadrature(f.grid(), samples.iter().map(|z| z.norm()), p))
}

/// `L^p` norm of real physical samples.
pub fn lp_norm_samples(grid: &Grid, samples: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lebesgue_quadrature(grid, samples.iter().map(|v| v.abs()), p))
}

/// `‖u‖_{L^q_t L^p_x}` over the trajectory window, trapezoid in time.
pub fn mixed_norm(traj: &Trajectory, q: f64, p: f64) -> Result<f64> {
    check_exponent(q)?;
    check_exponent(p)?;
    let spatial: Vec<f64> = traj
        .states()
        .par_iter()
        .map(|s| lp_norm(s, p))
        .collect::<Result<_>>()?;
    Ok(time_norm(&spatial, &traj.time().weights(), q))
}

/// Trapezoid `L^q` norm in time of per-node values.
pub fn time_norm(values: &[f64], weights: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let s: f64 = values.iter().zip(weights).map(|(v, w)| w * v.powf(q)).sum();
    s.powf(1.0 / q)
}

/// Whether `(q, p)` is Schrödinger-admissible in dimension `d`:
/// `2/q + d/p = d/2`, `2 ≤ q, p ≤ ∞`, excluding `(2, ∞)` in `d = 2`.
pub fn is_admissible(q: f64, p: f64, d: usize) -> bool {
    if !(q >= 2.0 && p >= 2.0) {
        return false;
    }
    let df = d as f64;
    let lhs = 2.0 / q + df / p;
    if (lhs - df / 2.0).abs() > 1e-12 {
        return false;
    }
    !(d == 2 && q == 2.0 && p.is_infinite())
}

pub fn check_admissible(q: f64, p: f64, d: usize) -> Result<()> {
    if is_admissible(q, p, d) {
        Ok(())
    } else {
        Err(Error::Inadmissible { q, p, d })
    }
}

/// A norm to evaluate on a field or a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    Sobolev { s: f64 },
    Lebesgue { p: f64 },
    Mixed { q: f64, p: f64 },
    /// Sum of mixed norms, e.g. `L^∞_t L²_x + L^{q₁}_t L^{r₁}_x`.
    Composite(Vec<(f64, f64)>),
}

impl NormSpec {
    /// Whether every space-time component is admissible in dimension `d`.
    pub fn admissible(&self, d: usize) -> bool {
        match self {
            NormSpec::Mixed { q, p } => is_admissible(*q, *p, d),
            NormSpec::Composite(parts) => parts.iter().all(|&(q, p)| is_admissible(q, p, d)),
            _ => true,
        }
    }

    /// Value on a trajectory; spatial norms take the supremum over nodes.
    pub fn evaluate(&self, traj: &Trajectory) -> Result<f64> {
        match self {
            NormSpec::Sobolev { s } => Ok(traj
                .states()
                .iter()
                .map(|u| sobolev_norm(u, *s))
                .fold(0.0, f64::max)),
            NormSpec::Lebesgue { p } => mixed_norm(traj, f64::INFINITY, *p),
            NormSpec::Mixed { q, p } => mixed_norm(traj, *q, *p),
            NormSpec::Composite(parts) => parts.iter().map(|&(q, p)| mixed_norm(traj, q, p)).sum(),
        }
    }
}

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub expected_slope: Option<f64>,
    pub abs_error: Option<f64>,
    pub samples: usize,
}

impl FitResult {
    pub fn with_expected(mut self, expected: f64) -> Self {
        self.expected_slope = Some(expected);
        self.abs_error = Some((self.slope - expected).abs());
        self
    }
}

/// Fit `y ≈ e^c x^k` to positive samples; at least three are required.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<FitResult> {
    if samples.len() < 3 {
        return Err(Error::FitSamples);
    }
    if samples.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParameter("power-law fit needs positive samples".into()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (slope, intercept, r_squared) = linear_fit(&pts);
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        expected_slope: None,
        abs_error: None,
        samples: samples.len(),
    })
}

/// Ordinary least squares; returns `(slope, intercept, r²)`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 1e-300 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    (slope, intercept, r2)
}
