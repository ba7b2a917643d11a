//! Potential and initial-data families, continuum spectral profiles and the
//! parabolic rescaling `η ↦ λ²η(λ·)`.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::lp::annular_cutoff;
use crate::norms;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// `√(π/3)`, the inner radius factor of the positivity region.
pub fn inner_factor() -> f64 {
    (PI / 3.0).sqrt()
}

/// `√(π/2)`, the outer radius factor of the positivity region.
pub fn outer_factor() -> f64 {
    (PI / 2.0).sqrt()
}

/// `(2π)ᵈ`, the amplitude that maps a continuum profile to lattice coefficients.
pub fn profile_amplitude(dim: usize) -> f64 {
    (2.0 * PI).powi(dim as i32)
}

/// A radial continuum Fourier profile `p(|ξ|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialProfile {
    /// `amp · χ_{lo ≤ · ≤ hi}(ρ / scale)`.
    Band { amp: f64, scale: f64, lo: f64, hi: f64 },
    /// `ρ^{−d} (ln ρ)^{−1} χ_{2 ≤ · ≤ top}(ρ)`.
    LogShell { dim: usize, top: f64 },
}

impl RadialProfile {
    pub fn eval(&self, rho: f64) -> f64 {
        match *self {
            RadialProfile::Band { amp, scale, lo, hi } => amp * annular_cutoff(rho / scale, lo, hi),
            RadialProfile::LogShell { dim, top } => {
                let c = annular_cutoff(rho, 2.0, top);
                if c == 0.0 {
                    0.0
                } else {
                    c / (rho.powi(dim as i32) * rho.ln())
                }
            }
        }
    }

    /// Support `[inner, outer]` in `ρ`, margins included.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            RadialProfile::Band { scale, lo, hi, .. } => ((scale * (lo - 0.25)).max(0.0), scale * (hi + 0.25)),
            RadialProfile::LogShell { top, .. } => (1.75, top + 0.25),
        }
    }

    /// Points where the profile is not analytic.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            RadialProfile::Band { scale, lo, hi, .. } => {
                vec![scale * (lo - 0.25).max(0.0), scale * lo, scale * hi, scale * (hi + 0.25)]
            }
            RadialProfile::LogShell { top, .. } => vec![1.75, 2.0, top, top + 0.25],
        }
    }

    /// Lattice field with coefficients `(2π)ᵈ p(|ξ|)`.
    pub fn to_field(&self, grid: &Grid) -> Result<Field> {
        let (_, outer) = self.support();
        if outer > grid.inscribed_radius() {
            return Err(Error::SupportOverflow(format!(
                "profile reaches |ξ| = {outer}, lattice holds {}",
                grid.inscribed_radius()
            )));
        }
        let amp = profile_amplitude(grid.dim());
        let radii = grid.radius_table();
        let coeffs = radii.iter().map(|&r| C64::new(amp * self.eval(r), 0.0)).collect();
        Ok(Field::from_coeffs_unchecked(*grid, coeffs))
    }
}

/// A coordinate-product continuum profile `amp · Π_i χ_{lo_i ≤ |·| ≤ hi_i}(ξ_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableProfile {
    pub amp: f64,
    pub bands: Vec<(f64, f64)>,
}

impl SeparableProfile {
    pub fn dim(&self) -> usize {
        self.bands.len()
    }

    /// Factor of axis `i` (without the amplitude).
    pub fn axis(&self, i: usize, x: f64) -> f64 {
        let (lo, hi) = self.bands[i];
        annular_cutoff(x, lo, hi)
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.amp * (0..self.dim()).map(|i| self.axis(i, xi[i])).product::<f64>()
    }

    /// Largest `|ξ_i|` on the support of axis `i`.
    pub fn axis_reach(&self, i: usize) -> f64 {
        self.bands[i].1 + 0.25
    }

    pub fn to_field(&self, grid: &Grid) -> Result<Field> {
        if grid.dim() != self.dim() {
            return Err(Error::Dimension(grid.dim()));
        }
        let lim = grid.inscribed_radius();
        if (0..self.dim()).any(|i| self.axis_reach(i) > lim) {
            return Err(Error::SupportOverflow("coordinate band exceeds lattice".into()));
        }
        let amp = profile_amplitude(grid.dim());
        Ok(Field::from_spectral_fn(*grid, |xi| C64::new(amp * self.eval(xi), 0.0)))
    }
}

/// Which annulus the bump potential occupies in units of its scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    HalfToTwo,
    OneToTwo,
}

impl Band {
    pub fn edges(&self) -> (f64, f64) {
        match self {
            Band::HalfToTwo => (0.5, 2.0),
            Band::OneToTwo => (1.0, 2.0),
        }
    }
}

/// Family tag of a potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Bump,
    AnisoBox,
    PowerLaw,
    Custom,
}

/// Construction parameters, where meaningful for the family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub m: Option<f64>,
    pub n: Option<f64>,
    pub a: Option<f64>,
    pub delta: Option<f64>,
}

/// A potential `η` on the torus with its construction metadata.
#[derive(Clone, Debug)]
pub struct Potential {
    field: Field,
    samples: Vec<C64>,
    family: Family,
    r: f64,
    params: Params,
    boundary_mass: f64,
}

impl Potential {
    fn build(field: Field, family: Family, r: f64, params: Params) -> Self {
        let samples = field.synthesize();
        Self::build_with_samples(field, samples, family, r, params)
    }

    fn build_with_samples(field: Field, samples: Vec<C64>, family: Family, r: f64, params: Params) -> Self {
        let boundary_mass = boundary_fraction(field.grid(), &samples);
        Self {
            field,
            samples,
            family,
            r,
            params,
            boundary_mass,
        }
    }

    /// Wrap an arbitrary field as a custom potential with exponent `r`.
    pub fn from_field(field: Field, r: f64) -> Self {
        Self::build(field, Family::Custom, r, Params::default())
    }

    /// `η ≡ 0`.
    pub fn zero(grid: Grid) -> Self {
        Self::from_field(Field::zeros(grid), 1.0)
    }

    /// `η ≡ c`.
    pub fn constant(grid: Grid, c: C64) -> Self {
        Self::from_field(Field::analyze_unchecked(grid, vec![c; grid.len()]), f64::INFINITY)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    /// Physical samples in storage order.
    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero()
    }

    /// Whether all samples are real.
    pub fn is_real(&self) -> bool {
        let scale = self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.samples.iter().all(|z| z.im.abs() <= 1e-14 * scale.max(1e-300))
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        norms::lp_norm(&self.field, p)
    }

    /// Fraction of `L¹` mass within a tenth of a period of the torus boundary
    /// (centred coordinates).
    pub fn boundary_mass(&self) -> f64 {
        self.boundary_mass
    }

    /// Set when the boundary mass exceeds 1%, i.e. the potential is not well
    /// concentrated and torus effects may matter.
    pub fn boundary_flag(&self) -> bool {
        self.boundary_mass > 0.01
    }

    /// Periodic product `η·f` formed from physical samples.
    pub fn multiply(&self, f: &Field) -> Field {
        assert_eq!(self.grid(), f.grid(), "grid mismatch");
        crate::grid::multiply_samples(f, &self.samples)
    }

    /// Same potential with the spectrum multiplied by a real scalar.
    pub fn scaled(&self, c: f64) -> Self {
        Self::build(self.field.scale_real(c), self.family, self.r, self.params)
    }

    /// Same metadata with a different field.
    pub fn with_field(&self, field: Field) -> Self {
        Self::build(field, self.family, self.r, self.params)
    }
}

fn boundary_fraction(grid: &Grid, samples: &[C64]) -> f64 {
    let l = grid.period();
    let mut total = 0.0;
    let mut edge = 0.0;
    for (i, z) in samples.iter().enumerate() {
        let x = grid.position(i);
        let near = x[..grid.dim()].iter().any(|&xa| {
            let c = if xa >= l / 2.0 { xa - l } else { xa };
            c.abs() >= 0.4 * l
        });
        let m = z.norm();
        total += m;
        if near {
            edge += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        edge / total
    }
}

/// Spectral profile of the bump `M^{d/r} F⁻¹(χ_band)(M·)`.
pub fn bump_profile(dim: usize, m: f64, r: f64, band: Band) -> RadialProfile {
    let d = dim as f64;
    let (lo, hi) = band.edges();
    RadialProfile::Band {
        amp: m.powf(d / r - d),
        scale: m,
        lo,
        hi,
    }
}

/// Bump potential with `η̂(ξ) = (2π)ᵈ M^{d/r−d} χ_band(ξ/M)`.
pub fn bump_potential(grid: &Grid, m: f64, r: f64, band: Band) -> Result<Potential> {
    check_positive("scale M", m)?;
    check_positive("exponent r", r)?;
    let field = bump_profile(grid.dim(), m, r, band).to_field(grid)?;
    Ok(Potential::build(
        field,
        Family::Bump,
        r,
        Params {
            m: Some(m),
            ..Params::default()
        },
    ))
}

/// Spectral profile of the anisotropic box potential: a band of width `N`
/// starting at `√(π/3)M` in `|ξ₁|`, and `N/2 ≤ |ξ_i| ≤ 2N` on the other axes,
/// with amplitude `N^{−d+d/r}`.
pub fn aniso_box_profile(dim: usize, m: f64, n: f64, r: f64) -> SeparableProfile {
    let d = dim as f64;
    let start = inner_factor() * m;
    let mut bands = vec![(start, start + n)];
    bands.extend(std::iter::repeat((n / 2.0, 2.0 * n)).take(dim - 1));
    SeparableProfile {
        amp: n.powf(-d + d / r),
        bands,
    }
}

pub fn aniso_box_potential(grid: &Grid, m: f64, n: f64, r: f64) -> Result<Potential> {
    check_positive("scale M", m)?;
    check_positive("width N", n)?;
    check_positive("exponent r", r)?;
    let field = aniso_box_profile(grid.dim(), m, n, r).to_field(grid)?;
    Ok(Potential::build(
        field,
        Family::AnisoBox,
        r,
        Params {
            m: Some(m),
            n: Some(n),
            ..Params::default()
        },
    ))
}

/// `max(|x|, δ)^{−a}` with `|x|` the periodic distance to the origin; the cap
/// defaults to half a grid spacing.
pub fn power_law_potential(grid: &Grid, a: f64, delta: Option<f64>) -> Result<Potential> {
    let d = grid.dim() as f64;
    if !(a >= 0.0 && a < d) {
        return Err(Error::InvalidParameter(format!("power-law exponent a = {a} outside [0, d)")));
    }
    let half = grid.spacing() / 2.0;
    let delta = delta.unwrap_or(half);
    if delta < half * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!("cap radius {delta} below half the grid spacing")));
    }
    let samples: Vec<C64> = (0..grid.len())
        .map(|i| C64::new(grid.torus_distance(i).max(delta).powf(-a), 0.0))
        .collect();
    let field = Field::analyze_unchecked(*grid, samples.clone());
    Ok(Potential::build_with_samples(
        field,
        samples,
        Family::PowerLaw,
        if a > 0.0 { d / a } else { f64::INFINITY },
        Params {
            a: Some(a),
            delta: Some(delta),
            ..Params::default()
        },
    ))
}

/// Spectral profile of the shell data `N^{−d/2−γ} χ_{N ≤ · ≤ 2N}`.
pub fn shell_profile(dim: usize, n: f64, gamma: f64) -> RadialProfile {
    RadialProfile::Band {
        amp: n.powf(-(dim as f64) / 2.0 - gamma),
        scale: 1.0,
        lo: n,
        hi: 2.0 * n,
    }
}

pub fn shell_data(grid: &Grid, n: f64, gamma: f64) -> Result<Field> {
    check_positive("scale N", n)?;
    shell_profile(grid.dim(), n, gamma).to_field(grid)
}

/// Spectral profile of `|ξ|^{−d} (ln|ξ|)^{−1} χ_{2 ≤ · ≤ M}`.
pub fn log_shell_profile(dim: usize, m: f64) -> RadialProfile {
    RadialProfile::LogShell { dim, top: m }
}

pub fn log_shell_data(grid: &Grid, m: f64) -> Result<Field> {
    if m < 4.0 {
        return Err(Error::InvalidParameter(format!("log shell top scale {m} below 4")));
    }
    log_shell_profile(grid.dim(), m).to_field(grid)
}

/// Spectral profile of the box data `L^{−d/2−γ} Π_i χ_{L/2 ≤ |·| ≤ 2L}(ξ_i)`.
pub fn box_profile(dim: usize, lp: f64, gamma: f64) -> SeparableProfile {
    SeparableProfile {
        amp: lp.powf(-(dim as f64) / 2.0 - gamma),
        bands: vec![(lp / 2.0, 2.0 * lp); dim],
    }
}

pub fn box_data(grid: &Grid, lp: f64, gamma: f64) -> Result<Field> {
    check_positive("scale L", lp)?;
    box_profile(grid.dim(), lp, gamma).to_field(grid)
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} = {v} must be positive")))
    }
}

/// Largest grid on which non-dyadic rescaling evaluates the transform directly.
const DIRECT_RESCALE_MODES: usize = 4096;

/// `η^λ(x) = λ²η(λx)` for a potential concentrated near the origin.
///
/// The rescaled spectrum is `λ^{2−d} η̂(ξ/λ)`. For `λ = 2^{−k}` this samples
/// the existing lattice; for `λ = 2^k` the frequencies `ξ/λ` are read off a
/// zero-padded transform on a `λ`-times larger torus. Other `λ` use direct
/// evaluation on small grids.
pub fn rescale_potential(eta: &Potential, lambda: f64) -> Result<Potential> {
    check_positive("rescale factor", lambda)?;
    let grid = *eta.grid();
    let d = grid.dim();
    let amp = lambda.powf(2.0 - d as f64);
    if lambda == 1.0 {
        return Ok(eta.clone());
    }
    // Spectral support check: η̂(ξ/λ) must vanish beyond the lattice.
    let reach = grid.inscribed_radius();
    let radii = grid.radius_table();
    let floor = 1e-14 * eta.field().max_abs();
    let support_max = eta
        .field()
        .coeffs()
        .iter()
        .zip(&radii)
        .filter(|(c, _)| c.norm() > floor)
        .map(|(_, &r)| r)
        .fold(0.0, f64::max);
    if lambda * support_max > reach + 1e-9 {
        return Err(Error::SupportOverflow(format!(
            "rescaled spectrum reaches {} beyond lattice radius {reach}",
            lambda * support_max
        )));
    }
    let log = lambda.log2();
    let coeffs: Vec<C64> = if (log - log.round()).abs() < 1e-12 && log < 0.0 {
        let k = 2i64.pow((-log.round()) as u32);
        (0..grid.len())
            .map(|i| {
                let w = grid.wavenumbers(i);
                let scaled: Vec<i64> = w[..d].iter().map(|&x| x * k).collect();
                eta.field().coeff_at(&scaled) * amp
            })
            .collect()
    } else if (log - log.round()).abs() < 1e-12 {
        let k = 2usize.pow(log.round() as u32);
        let big = Grid::new_uncapped(d, grid.n() * k, grid.period() * k as f64);
        let mut padded = vec![C64::default(); big.len()];
        for (i, z) in eta.samples().iter().enumerate() {
            let w = grid.wavenumbers(i); // centred sample offsets share the wavenumber layout
            padded[big.flat_index_wrapped(&w[..d])] = *z;
        }
        let spec = Field::analyze_unchecked(big, padded);
        (0..grid.len())
            .map(|i| {
                let w = grid.wavenumbers(i);
                spec.coeffs()[big.flat_index_wrapped(&w[..d])] * amp
            })
            .collect()
    } else {
        if grid.len() > DIRECT_RESCALE_MODES {
            return Err(Error::InvalidParameter(format!(
                "non-dyadic rescaling limited to {DIRECT_RESCALE_MODES} modes"
            )));
        }
        direct_rescale(eta, lambda, amp)
    };
    let field = Field::from_coeffs(grid, coeffs)?;
    Ok(Potential::build(field, eta.family, eta.r, eta.params))
}

fn direct_rescale(eta: &Potential, lambda: f64, amp: f64) -> Vec<C64> {
    let grid = eta.grid();
    let d = grid.dim();
    let l = grid.period();
    let w = grid.cell_volume();
    let centred: Vec<[f64; 5]> = (0..grid.len())
        .map(|i| {
            let mut x = grid.position(i);
            for xa in x[..d].iter_mut() {
                if *xa >= l / 2.0 {
                    *xa -= l;
                }
            }
            x
        })
        .collect();
    (0..grid.len())
        .map(|k| {
            let xi = grid.frequency(k);
            let mut acc = C64::default();
            for (x, z) in centred.iter().zip(eta.samples()) {
                let ph: f64 = (0..d).map(|a| x[a] * xi[a] / lambda).sum();
                acc += z * C64::from_polar(1.0, -ph);
            }
            acc * w * amp
        })
        .collect()
}

/// Load a custom potential from text lines `k₁ … k_d re im`, where `k_i` are
/// integer wavenumbers. Blank lines and lines starting with `#` are skipped.
pub fn load_custom_potential(grid: &Grid, path: &Path, r: f64) -> Result<Potential> {
    let text = std::fs::read_to_string(path)?;
    parse_custom_potential(grid, &text, r)
}

pub fn parse_custom_potential(grid: &Grid, text: &str, r: f64) -> Result<Potential> {
    let d = grid.dim();
    let mut coeffs = vec![C64::default(); grid.len()];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != d + 2 {
            return Err(Error::Config(format!(
                "line {}: expected {} fields, found {}",
                lineno + 1,
                d + 2,
                parts.len()
            )));
        }
        let bad = |what: &str| Error::Config(format!("line {}: bad {what}", lineno + 1));
        let k: Vec<i64> = parts[..d]
            .iter()
            .map(|s| s.parse().map_err(|_| bad("wavenumber")))
            .collect::<Result<_>>()?;
        let re: f64 = parts[d].parse().map_err(|_| bad("real part"))?;
        let im: f64 = parts[d + 1].parse().map_err(|_| bad("imaginary part"))?;
        let idx = grid
            .flat_index(&k)
            .ok_or_else(|| Error::IndexRange(format!("line {}: wavenumber {k:?} off lattice", lineno + 1)))?;
        coeffs[idx] = C64::new(re, im);
    }
    Ok(Potential::from_field(Field::from_coeffs(*grid, coeffs)?, r))
}
