//! The Duhamel integral `A(u₀)(t) = ∫₀ᵗ e^{−iρΔ}(η e^{iρΔ}u₀) dρ`, its trapezoid
//! discretization for time-dependent sources, the Picard series, and the
//! lower-bound evaluators used by the norm-inflation constructions.
//!
//! Three evaluation paths share one normalization: the lattice path sums over
//! spectral supports, [`radial`] integrates radial profiles in polar
//! coordinates, and [`separable`] factorizes coordinate-product profiles.

pub mod radial;
pub mod separable;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, ProductMode, TimeGrid, Trajectory};
use crate::norms::sobolev_norm;
use crate::potentials::Potential;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `sin(x)/x` with the removable singularity filled in.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `(e^{itΦ} − 1)/(iΦ)` in the cancellation-free form `t e^{itΦ/2} sinc(tΦ/2)`.
#[inline]
pub fn duhamel_kernel(t: f64, phi: f64) -> C64 {
    let h = 0.5 * t * phi;
    C64::from_polar(t * sinc(h), h)
}

/// Real part of the kernel, `sin(tΦ)/Φ` (equal to `t` at `Φ = 0`).
#[inline]
pub fn duhamel_kernel_re(t: f64, phi: f64) -> f64 {
    t * sinc(t * phi)
}

/// `A(u₀)(t)` by direct summation over the spectral supports, forming the
/// product without wrap-around. Fails if some pair of support frequencies sums
/// off the lattice.
pub fn duhamel_kernel_apply(eta: &Potential, u0: &Field, t: f64) -> Result<Field> {
    duhamel_kernel_apply_with(eta, u0, t, ProductMode::Padded)
}

/// [`duhamel_kernel_apply`] with an explicit product mode; the periodic mode
/// matches [`duhamel_quadrature`] exactly in the limit of fine time steps.
pub fn duhamel_kernel_apply_with(eta: &Potential, u0: &Field, t: f64, mode: ProductMode) -> Result<Field> {
    let grid = *u0.grid();
    grid.check_same(eta.grid())?;
    if mode == ProductMode::Padded {
        check_sum_support(&grid, eta.field(), u0)?;
    }
    let ef = eta.field();
    let w = 1.0 / grid.volume();
    Ok(convolve_with_phase(&grid, ef, u0, mode, |q, q2| duhamel_kernel(t, q - q2) * w))
}

/// Output-driven bilinear sum `Σ_{ξ₂} kern(|ξ|², |ξ₂|²) f̂(ξ − ξ₂) ĝ(ξ₂)` over
/// the support of `g`.
pub(crate) fn convolve_with_phase(
    grid: &Grid,
    f: &Field,
    g: &Field,
    mode: ProductMode,
    kern: impl Fn(f64, f64) -> C64 + Sync,
) -> Field {
    let d = grid.dim();
    let supp: Vec<([i64; 5], f64, C64)> = g
        .support()
        .into_iter()
        .map(|i| (grid.wavenumbers(i), grid.freq_sq(i), g.coeffs()[i]))
        .collect();
    if supp.is_empty() || f.is_zero() {
        return Field::zeros(*grid);
    }
    let fc = f.coeffs();
    let coeffs: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .map(|out| {
            let k = grid.wavenumbers(out);
            let q = grid.freq_sq(out);
            let mut acc = C64::default();
            let mut k1 = [0i64; 5];
            for (k2, q2, c2) in &supp {
                for a in 0..d {
                    k1[a] = k[a] - k2[a];
                }
                let idx = match mode {
                    ProductMode::Padded => match grid.flat_index(&k1[..d]) {
                        Some(i) => i,
                        None => continue,
                    },
                    ProductMode::Periodic => grid.flat_index_wrapped(&k1[..d]),
                };
                let c1 = fc[idx];
                if c1.re != 0.0 || c1.im != 0.0 {
                    acc += kern(q, *q2) * c1 * c2;
                }
            }
            acc
        })
        .collect();
    Field::from_coeffs_unchecked(*grid, coeffs)
}

/// Error unless every sum of a frequency in `supp f̂` and one in `supp ĝ` lies
/// on the lattice.
pub(crate) fn check_sum_support(grid: &Grid, f: &Field, g: &Field) -> Result<()> {
    let d = grid.dim();
    let bounds = |h: &Field| {
        let mut lo = [i64::MAX; 5];
        let mut hi = [i64::MIN; 5];
        for i in h.support() {
            let k = grid.wavenumbers(i);
            for a in 0..d {
                lo[a] = lo[a].min(k[a]);
                hi[a] = hi[a].max(k[a]);
            }
        }
        (lo, hi)
    };
    if f.is_zero() || g.is_zero() {
        return Ok(());
    }
    let (flo, fhi) = bounds(f);
    let (glo, ghi) = bounds(g);
    let half = (grid.n() / 2) as i64;
    let fits = (0..d).all(|a| flo[a] + glo[a] >= -half && fhi[a] + ghi[a] < half);
    if fits {
        return Ok(());
    }
    // The bounding boxes overflow; check the actual pairs.
    let fs: Vec<[i64; 5]> = f.support().into_iter().map(|i| grid.wavenumbers(i)).collect();
    let gs: Vec<[i64; 5]> = g.support().into_iter().map(|i| grid.wavenumbers(i)).collect();
    let bad = fs.par_iter().any(|a| {
        gs.iter()
            .any(|b| (0..d).any(|x| a[x] + b[x] < -half || a[x] + b[x] >= half))
    });
    if bad {
        Err(Error::SupportOverflow(
            "sum of spectral supports leaves the lattice; refine the grid".into(),
        ))
    } else {
        Ok(())
    }
}

/// The interaction-picture integrand `e^{−iρΔ}(η e^{iρΔ} f)`.
pub fn interaction_integrand(eta: &Potential, f: &Field, rho: f64) -> Field {
    eta.multiply(&f.propagate_free(rho)).propagate_free(-rho)
}

/// Cumulative trapezoid in time of the interaction-picture integrand applied
/// to a source trajectory.
pub fn duhamel_quadrature(eta: &Potential, source: &Trajectory, tg: &TimeGrid) -> Result<Trajectory> {
    source.check_time(tg)?;
    source.grid().check_same(eta.grid())?;
    let nodes = tg.nodes();
    let integrand: Vec<Field> = nodes
        .par_iter()
        .zip(source.states())
        .map(|(&rho, s)| interaction_integrand(eta, s, rho))
        .collect();
    Ok(cumulative_trapezoid(tg, &integrand))
}

/// `F(t_k) = Σ_{j ≤ k}` trapezoid of the node values `f_j`, with `F(0) = 0`.
pub fn cumulative_trapezoid(tg: &TimeGrid, values: &[Field]) -> Trajectory {
    let h = tg.step();
    let grid = *values[0].grid();
    let mut out = Vec::with_capacity(values.len());
    let mut acc = Field::zeros(grid);
    out.push(acc.clone());
    for pair in values.windows(2) {
        acc.axpy(C64::new(h / 2.0, 0.0), &pair[0]);
        acc.axpy(C64::new(h / 2.0, 0.0), &pair[1]);
        out.push(acc.clone());
    }
    Trajectory::new(*tg, out).expect("one state per node")
}

/// Trapezoid integral of node values over the whole window.
pub fn trapezoid(tg: &TimeGrid, values: &[Field]) -> Field {
    let w = tg.weights();
    let mut acc = Field::zeros(*values[0].grid());
    for (v, wk) in values.iter().zip(w) {
        acc.axpy(C64::new(wk, 0.0), v);
    }
    acc
}

/// Iterated Duhamel terms `I₀ = v₀`, `I_n = i ∫₀ᵗ e^{−iρΔ}(η e^{iρΔ} I_{n−1}) dρ`
/// and the partial sum `S_N = Σ_n e^{itΔ} I_n`.
#[derive(Clone, Debug)]
pub struct PicardSeries {
    pub terms: Vec<Trajectory>,
    /// `‖I_n(T)‖_{H^s}` for each term.
    pub final_norms: Vec<f64>,
    pub partial_sum: Trajectory,
    pub s: f64,
}

impl PicardSeries {
    /// `max_n ‖I_{n+1}(T)‖ / ‖I_n(T)‖` over consecutive nonzero terms.
    pub fn ratio(&self) -> f64 {
        self.final_norms
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }
}

pub fn picard_series(eta: &Potential, v0: &Field, tg: &TimeGrid, terms: usize, s: f64) -> Result<PicardSeries> {
    if terms == 0 {
        return Err(Error::InvalidParameter("Picard series needs at least one term".into()));
    }
    v0.grid().check_same(eta.grid())?;
    let mut list = vec![Trajectory::constant(*tg, v0)];
    for _ in 0..terms {
        let next = duhamel_quadrature(eta, list.last().unwrap(), tg)?;
        let states = next.into_states().into_iter().map(|f| f.scale(C64::i())).collect();
        list.push(Trajectory::new(*tg, states)?);
    }
    let final_norms = list.iter().map(|tr| sobolev_norm(tr.last(), s)).collect();
    let nodes = tg.nodes();
    let partial: Vec<Field> = nodes
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut acc = Field::zeros(*v0.grid());
            for term in &list {
                acc.axpy(C64::new(1.0, 0.0), term.state(k));
            }
            acc.propagate_free(t)
        })
        .collect();
    Ok(PicardSeries {
        terms: list,
        final_norms,
        partial_sum: Trajectory::new(*tg, partial)?,
        s,
    })
}

/// A frequency region used for lower bounds and phase checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `inner ≤ |ξ| ≤ outer`.
    Shell { inner: f64, outer: f64 },
    /// `lo_i ≤ |ξ_i| ≤ hi_i` on every axis.
    AbsBox { lo: Vec<f64>, hi: Vec<f64> },
    /// `lo_i ≤ ξ_i ≤ hi_i` on every axis.
    SignedBox { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    /// The positivity shell `√(π/3)M ≤ |ξ| ≤ √(π/2)M`.
    pub fn positivity_shell(m: f64) -> Self {
        Region::Shell {
            inner: crate::potentials::inner_factor() * m,
            outer: crate::potentials::outer_factor() * m,
        }
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        match self {
            Region::Shell { inner, outer } => {
                let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
                r >= *inner && r <= *outer
            }
            Region::AbsBox { lo, hi } => xi.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| x.abs() >= *l && x.abs() <= *h),
            Region::SignedBox { lo, hi } => xi.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| x >= l && x <= h),
        }
    }

    /// Range of `|ξ|²` over the region.
    pub fn freq_sq_range(&self) -> Result<(f64, f64)> {
        let empty = || Error::EmptyRegion(format!("{self:?}"));
        match self {
            Region::Shell { inner, outer } => {
                if inner > outer || *outer < 0.0 {
                    return Err(empty());
                }
                Ok((inner.max(0.0).powi(2), outer * outer))
            }
            Region::AbsBox { lo, hi } => {
                if lo.len() != hi.len() || lo.iter().zip(hi).any(|(l, h)| l > h || *h < 0.0) {
                    return Err(empty());
                }
                Ok((
                    lo.iter().map(|l| l.max(0.0).powi(2)).sum(),
                    hi.iter().map(|h| h * h).sum(),
                ))
            }
            Region::SignedBox { lo, hi } => {
                if lo.len() != hi.len() || lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(empty());
                }
                let min = lo
                    .iter()
                    .zip(hi)
                    .map(|(&l, &h)| if l <= 0.0 && h >= 0.0 { 0.0 } else { (l * l).min(h * h) })
                    .sum();
                let max = lo.iter().zip(hi).map(|(&l, &h)| (l * l).max(h * h)).sum();
                Ok((min, max))
            }
        }
    }

    /// Flat indices of lattice points inside the region.
    pub fn lattice_points(&self, grid: &Grid) -> Vec<usize> {
        let mut out = Vec::new();
        grid.for_each_frequency(|flat, xi| {
            if self.contains(xi) {
                out.push(flat);
            }
        });
        out
    }
}

/// Minimum of `sin` over the interval `[a, b]`.
pub fn sin_min_on(a: f64, b: f64) -> f64 {
    use std::f64::consts::PI;
    // First point 3π/2 + 2πk at or after a.
    let k = ((a - 1.5 * PI) / (2.0 * PI)).ceil();
    if 1.5 * PI + 2.0 * PI * k <= b {
        -1.0
    } else {
        a.sin().min(b.sin())
    }
}

/// Lower bound of `sin(t(|ξ|² − |ξ₂|²))` over `ξ ∈ Ω`, `ξ₂ ∈` the data
/// region, computed from the ranges of `|ξ|²` and `|ξ₂|²`; it is attained when
/// both regions contain their extremal radii.
pub fn phase_min_check(omega: &Region, data: &Region, t: f64) -> Result<f64> {
    let (a1, b1) = omega.freq_sq_range()?;
    let (a2, b2) = data.freq_sq_range()?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = (t * (a1 - b2), t * (b1 - a2));
    Ok(sin_min_on(lo.min(hi), lo.max(hi)))
}

/// Minimum of `Re Â` over `Ω` and the `Ω`-restricted weighted norm of `Re Â`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub min_re: f64,
    pub norm_on_omega: f64,
}

/// Lattice evaluation of the real part of `A(u₀)(t)` on `Ω`.
pub fn realpart_lower_bound(eta: &Potential, u0: &Field, t: f64, omega: &Region, gamma: f64) -> Result<LowerBound> {
    let pts = omega.lattice_points(u0.grid());
    if pts.is_empty() {
        return Err(Error::EmptyRegion(format!("{omega:?} has no lattice points")));
    }
    let a = duhamel_kernel_apply(eta, u0, t)?;
    Ok(lower_bound_from(&a, &pts, gamma))
}

pub(crate) fn lower_bound_from(a: &Field, pts: &[usize], gamma: f64) -> LowerBound {
    let g = a.grid();
    let mut min_re = f64::INFINITY;
    let mut sum = 0.0;
    for &i in pts {
        let re = a.coeffs()[i].re;
        min_re = min_re.min(re);
        sum += (1.0 + g.freq_sq(i)).powf(gamma) * re * re;
    }
    LowerBound {
        min_re,
        norm_on_omega: (sum / g.volume()).sqrt(),
    }
}

#[cfg(test)]
mod tests;
