//! Torus discretization: grids, spectral fields, transforms, Fourier symbols
//! and aliasing-safe products.
//!
//! Convention: `û(ξ) = (L/n)ᵈ Σₓ e^{−ix·ξ} u(x)` and
//! `u(x) = L⁻ᵈ Σ_ξ e^{ix·ξ} û(ξ)`, so `û` approximates the continuum integral
//! transform and products carry an `L⁻ᵈ` convolution weight.

mod fft;
mod field;
mod product;
mod time;

pub use field::Field;
pub use product::{multiply_samples, pointwise_multiply, ProductMode};
pub use time::{TimeGrid, Trajectory};

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Largest supported number of lattice points.
pub const MAX_MODES: usize = 1 << 22;
/// Largest supported dimension.
pub const MAX_DIM: usize = 5;

/// A `d`-dimensional torus of period `L` sampled with `n` points per axis.
///
/// Frequencies are `ξ = (2π/L)·k` with integer `k ∈ {−n/2, …, n/2−1}ᵈ`.
/// Coefficients are stored in FFT order, row-major with axis 0 slowest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    period: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Dimension(dim));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::Period(period));
        }
        let len = n
            .checked_pow(dim as u32)
            .filter(|&m| m <= MAX_MODES)
            .ok_or(Error::GridTooLarge(n.saturating_pow(dim as u32)))?;
        debug_assert!(len <= MAX_MODES);
        Ok(Self { dim, n, period })
    }

    /// Internal scratch grid exempt from the size cap.
    pub(crate) fn new_uncapped(dim: usize, n: usize, period: f64) -> Self {
        Self { dim, n, period }
    }

    /// Grid with period `2π`, i.e. unit frequency step.
    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Number of lattice points `nᵈ`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency step `2π/L`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Physical sample spacing `L/n`.
    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Physical cell volume `(L/n)ᵈ`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Torus volume `Lᵈ`.
    pub fn volume(&self) -> f64 {
        self.period.powi(self.dim as i32)
    }

    /// Integer wavenumber of axis index `j`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        let half = self.n / 2;
        if j < half {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Axis index of integer wavenumber `k`, if it lies on the lattice.
    #[inline]
    pub fn axis_index(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Axis index of `k` reduced modulo `n`.
    #[inline]
    pub fn axis_index_wrapped(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Integer wavenumbers of a flat index.
    pub fn wavenumbers(&self, flat: usize) -> [i64; MAX_DIM] {
        let mut out = [0i64; MAX_DIM];
        let mut rest = flat;
        for a in (0..self.dim).rev() {
            out[a] = self.wavenumber(rest % self.n);
            rest /= self.n;
        }
        out
    }

    /// Flat index of a wavenumber tuple, if it lies on the lattice.
    pub fn flat_index(&self, k: &[i64]) -> Option<usize> {
        let mut flat = 0;
        for &ka in &k[..self.dim] {
            flat = flat * self.n + self.axis_index(ka)?;
        }
        Some(flat)
    }

    /// Flat index of a wavenumber tuple reduced modulo `n` on every axis.
    pub fn flat_index_wrapped(&self, k: &[i64]) -> usize {
        k[..self.dim]
            .iter()
            .fold(0, |flat, &ka| flat * self.n + self.axis_index_wrapped(ka))
    }

    /// Frequency vector of a flat index.
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let k = self.wavenumbers(flat);
        let h = self.step();
        let mut xi = [0.0; MAX_DIM];
        for a in 0..self.dim {
            xi[a] = h * k[a] as f64;
        }
        xi
    }

    /// `|ξ|²` of a flat index.
    pub fn freq_sq(&self, flat: usize) -> f64 {
        let k = self.wavenumbers(flat);
        let h = self.step();
        k[..self.dim].iter().map(|&ka| (h * ka as f64).powi(2)).sum()
    }

    /// Table of `|ξ|²` in storage order.
    pub fn freq_sq_table(&self) -> Vec<f64> {
        let h2 = self.step() * self.step();
        let axis: Vec<f64> = (0..self.n)
            .map(|j| (self.wavenumber(j) as f64).powi(2) * h2)
            .collect();
        let mut out = vec![0.0; self.len()];
        let mut idx = [0usize; MAX_DIM];
        for v in out.iter_mut() {
            *v = idx[..self.dim].iter().map(|&j| axis[j]).sum();
            self.advance(&mut idx);
        }
        out
    }

    /// Table of `|ξ|` in storage order.
    pub fn radius_table(&self) -> Vec<f64> {
        let mut t = self.freq_sq_table();
        t.iter_mut().for_each(|v| *v = v.sqrt());
        t
    }

    /// Advance a multi-index odometer in storage order.
    #[inline]
    pub(crate) fn advance(&self, idx: &mut [usize; MAX_DIM]) {
        for a in (0..self.dim).rev() {
            idx[a] += 1;
            if idx[a] < self.n {
                return;
            }
            idx[a] = 0;
        }
    }

    /// Visit every lattice point with its flat index and frequency vector.
    pub fn for_each_frequency(&self, mut f: impl FnMut(usize, &[f64])) {
        let h = self.step();
        let mut idx = [0usize; MAX_DIM];
        let mut xi = [0.0; MAX_DIM];
        for flat in 0..self.len() {
            for a in 0..self.dim {
                xi[a] = h * self.wavenumber(idx[a]) as f64;
            }
            f(flat, &xi[..self.dim]);
            self.advance(&mut idx);
        }
    }

    /// Radius of the largest ball centred at the origin whose lattice points
    /// are all representable, `(2π/L)(n/2 − 1)`.
    pub fn inscribed_radius(&self) -> f64 {
        self.step() * (self.n / 2 - 1) as f64
    }

    /// Largest `|ξ|` on the lattice (the corner `(−n/2, …, −n/2)`).
    pub fn max_radius(&self) -> f64 {
        self.step() * (self.n / 2) as f64 * (self.dim as f64).sqrt()
    }

    /// Smallest dyadic `N` with `N ≥ max |ξ|`, so `φ_{≤N} ≡ 1` on the lattice.
    pub fn nmax(&self) -> f64 {
        let r = self.max_radius();
        let mut n = 1.0;
        while n < r {
            n *= 2.0;
        }
        n
    }

    /// Dyadic scales `1, 2, …, Nmax`.
    pub fn dyadic_scales(&self) -> Vec<f64> {
        let nmax = self.nmax();
        let mut out = vec![1.0];
        while *out.last().unwrap() < nmax {
            let next = out.last().unwrap() * 2.0;
            out.push(next);
        }
        out
    }

    /// Same torus with `factor` times as many samples per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.dim, self.n * factor, self.period)
    }

    /// Physical coordinates of a flat index, in `[0, L)`.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        let mut rest = flat;
        let dx = self.spacing();
        for a in (0..self.dim).rev() {
            x[a] = (rest % self.n) as f64 * dx;
            rest /= self.n;
        }
        x
    }

    /// Periodic distance of a flat sample to the origin.
    pub fn torus_distance(&self, flat: usize) -> f64 {
        // Sample offsets share the wavenumber layout, which keeps x ↦ −x exact.
        let k = self.wavenumbers(flat);
        let dx = self.spacing();
        k[..self.dim]
            .iter()
            .map(|&ka| (ka as f64 * dx).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// `⟨ξ⟩ = (1 + |ξ|²)^{1/2}` from `|ξ|²`.
#[inline]
pub fn japanese_bracket_sq(freq_sq: f64) -> f64 {
    (1.0 + freq_sq).sqrt()
}

/// True when `x` is `2ᵏ` for some integer `k ≥ 0`.
pub fn is_dyadic(x: f64) -> bool {
    if !(x.is_finite() && x >= 1.0) {
        return false;
    }
    let l = x.log2().round();
    (2f64.powf(l) - x).abs() <= 1e-12 * x
}
