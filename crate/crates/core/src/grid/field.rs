use super::{fft, Grid};
use crate::error::{Error, Result};
use crate::C64;
use rayon::prelude::*;
use rustfft::FftDirection;

/// A complex function on the torus, stored as spectral coefficients `û(ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    coeffs: Vec<C64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![C64::default(); grid.len()],
        }
    }

    /// Wrap spectral coefficients given in storage order.
    pub fn from_coeffs(grid: Grid, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        if let Some(bad) = coeffs.iter().find(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter(format!("non-finite coefficient {bad}")));
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_coeffs_unchecked(grid: Grid, coeffs: Vec<C64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub(crate) fn analyze_unchecked(grid: Grid, mut samples: Vec<C64>) -> Self {
        fft::transform(&mut samples, grid.n(), grid.dim(), FftDirection::Forward);
        scale_in_place(&mut samples, grid.cell_volume());
        Self { grid, coeffs: samples }
    }

    /// Coefficients `f(ξ)` for every lattice frequency.
    pub fn from_spectral_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> C64) -> Self {
        let mut coeffs = vec![C64::default(); grid.len()];
        grid.for_each_frequency(|flat, xi| coeffs[flat] = f(xi));
        Self { grid, coeffs }
    }

    /// Coefficients `(2π)ᵈ p(ξ)` from a continuum Fourier profile `p`, so that
    /// the synthesized samples approximate the continuum inverse transform.
    pub fn from_spectral_profile(grid: Grid, mut p: impl FnMut(&[f64]) -> f64) -> Self {
        let amp = (2.0 * std::f64::consts::PI).powi(grid.dim() as i32);
        Self::from_spectral_fn(grid, |xi| C64::new(amp * p(xi), 0.0))
    }

    /// A single lattice mode `û(ξ₀) = c`, addressed by integer wavenumbers.
    pub fn single_mode(grid: Grid, k: &[i64], c: C64) -> Result<Self> {
        let flat = grid
            .flat_index(k)
            .ok_or_else(|| Error::IndexRange(format!("wavenumber {k:?} off lattice")))?;
        let mut f = Self::zeros(grid);
        f.coeffs[flat] = c;
        Ok(f)
    }

    /// Forward transform of physical samples in storage order.
    pub fn analyze(grid: Grid, samples: &[C64]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        Ok(Self::analyze_unchecked(grid, samples.to_vec()))
    }

    /// Forward transform of real physical samples.
    pub fn analyze_real(grid: Grid, samples: &[f64]) -> Result<Self> {
        let z: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::analyze(grid, &z)
    }

    /// Physical samples `u(x)` in storage order.
    pub fn synthesize(&self) -> Vec<C64> {
        let mut out = self.coeffs.clone();
        fft::transform(&mut out, self.grid.n(), self.grid.dim(), FftDirection::Inverse);
        scale_in_place(&mut out, 1.0 / self.grid.volume());
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient at integer wavenumbers, zero off the lattice.
    pub fn coeff_at(&self, k: &[i64]) -> C64 {
        self.grid
            .flat_index(k)
            .map_or(C64::default(), |i| self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Flat indices of nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `L⁻ᵈ Σ |û|²`, the squared `L²` norm.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Multiply each coefficient by `symbol(ξ)`.
    ///
    /// A non-finite symbol value is tolerated only where the coefficient is
    /// zero (the product is then zero).
    pub fn apply_symbol(&self, mut symbol: impl FnMut(&[f64]) -> C64) -> Result<Self> {
        let mut out = self.clone();
        let mut bad = None;
        self.grid.for_each_frequency(|flat, xi| {
            let c = out.coeffs[flat];
            if c.re == 0.0 && c.im == 0.0 {
                return;
            }
            let s = symbol(xi);
            if !(s.re.is_finite() && s.im.is_finite()) {
                bad.get_or_insert_with(|| xi.to_vec());
            }
            out.coeffs[flat] = c * s;
        });
        match bad {
            Some(xi) => Err(Error::NonFiniteSymbol(xi)),
            None => Ok(out),
        }
    }

    /// Multiply each coefficient by a real radial profile `w(|ξ|)`.
    pub fn apply_radial(&self, w: impl Fn(f64) -> f64 + Sync) -> Self {
        let g = self.grid;
        self.map_indexed(|flat, c| c * w(g.freq_sq(flat).sqrt()))
    }

    /// Multiply each coefficient by a real profile of `|ξ|²`.
    pub fn apply_freq_sq(&self, w: impl Fn(f64) -> f64 + Sync) -> Self {
        let g = self.grid;
        self.map_indexed(|flat, c| c * w(g.freq_sq(flat)))
    }

    /// Multiply coefficient-wise by a precomputed table.
    pub fn apply_table(&self, table: &[f64]) -> Self {
        assert_eq!(table.len(), self.coeffs.len());
        self.map_indexed(|flat, c| c * table[flat])
    }

    fn map_indexed(&self, f: impl Fn(usize, C64) -> C64 + Sync) -> Self {
        let coeffs = if self.coeffs.len() >= 1 << 14 {
            self.coeffs
                .par_iter()
                .enumerate()
                .map(|(i, &c)| f(i, c))
                .collect()
        } else {
            self.coeffs.iter().enumerate().map(|(i, &c)| f(i, c)).collect()
        };
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Free Schrödinger flow `e^{itΔ}`: symbol `e^{−it|ξ|²}`.
    pub fn propagate_free(&self, t: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        let g = self.grid;
        self.map_indexed(|flat, c| c * C64::from_polar(1.0, -t * g.freq_sq(flat)))
    }

    /// Bessel potential `⟨∇⟩^α`: symbol `(1 + |ξ|²)^{α/2}`.
    pub fn bessel(&self, alpha: f64) -> Self {
        if alpha == 0.0 {
            return self.clone();
        }
        self.apply_freq_sq(|q| (1.0 + q).powf(alpha / 2.0))
    }

    /// Riesz potential `|∇|^s`: symbol `|ξ|^s`, with the zero mode sent to zero
    /// for `s < 0`.
    pub fn abs_grad(&self, s: f64) -> Self {
        if s == 0.0 {
            return self.clone();
        }
        self.apply_freq_sq(|q| if q == 0.0 { 0.0 } else { q.powf(s / 2.0) })
    }

    /// `(−Δ)⁻¹ = |∇|⁻²`, zero on the zero mode.
    pub fn inverse_laplacian(&self) -> Self {
        self.apply_freq_sq(|q| if q == 0.0 { 0.0 } else { 1.0 / q })
    }

    /// `Δ`: symbol `−|ξ|²`.
    pub fn laplacian(&self) -> Self {
        self.apply_freq_sq(|q| -q)
    }

    pub fn scale(&self, a: C64) -> Self {
        self.map_indexed(|_, c| c * a)
    }

    pub fn scale_real(&self, a: f64) -> Self {
        self.map_indexed(|_, c| c * a)
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: C64, other: &Field) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
    }

    pub fn add(&self, other: &Field) -> Self {
        let mut out = self.clone();
        out.axpy(C64::new(1.0, 0.0), other);
        out
    }

    pub fn sub(&self, other: &Field) -> Self {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other);
        out
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Restrict to the coefficients where `keep(ξ)` holds.
    pub fn restrict(&self, mut keep: impl FnMut(&[f64]) -> bool) -> Self {
        let mut out = self.clone();
        self.grid.for_each_frequency(|flat, xi| {
            if !keep(xi) {
                out.coeffs[flat] = C64::default();
            }
        });
        out
    }
}

fn scale_in_place(v: &mut [C64], a: f64) {
    if v.len() >= 1 << 14 {
        v.par_iter_mut().for_each(|c| *c *= a);
    } else {
        v.iter_mut().for_each(|c| *c *= a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use std::f64::consts::PI;

    fn direct_dft(grid: &Grid, samples: &[C64]) -> Vec<C64> {
        let w = grid.cell_volume();
        (0..grid.len())
            .map(|k| {
                let xi = grid.frequency(k);
                let mut acc = C64::default();
                for (x, s) in samples.iter().enumerate() {
                    let pos = grid.position(x);
                    let phase: f64 = (0..grid.dim()).map(|a| pos[a] * xi[a]).sum();
                    acc += s * C64::from_polar(1.0, -phase);
                }
                acc * w
            })
            .collect()
    }

    fn rel_err(a: &[C64], b: &[C64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den.max(1e-300)).sqrt()
    }

    #[test]
    fn constant_samples_give_dc() {
        let g = Grid::unit(1, 4).unwrap();
        let f = Field::analyze(g, &[C64::new(3.0, 0.0); 4]).unwrap();
        assert!((f.coeffs[0] - C64::new(6.0 * PI, 0.0)).norm() < 1e-12);
        assert!(f.coeffs[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn matches_direct_dft() {
        for (d, n, l) in [(1, 16, 2.0 * PI), (2, 8, 3.0), (3, 4, 1.5)] {
            let g = Grid::new(d, n, l).unwrap();
            let f = random_field(&g, 7, None);
            let samples = f.synthesize();
            let again = Field::analyze(g, &samples).unwrap();
            assert!(rel_err(again.coeffs(), &direct_dft(&g, &samples)) < 1e-12);
        }
    }

    #[test]
    fn single_mode_synthesis() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let f = Field::single_mode(g, &[2, -1], C64::new(g.volume(), 0.0)).unwrap();
        let s = f.synthesize();
        let h = g.step();
        for (flat, v) in s.iter().enumerate() {
            let x = g.position(flat);
            let expect = C64::from_polar(1.0, x[0] * 2.0 * h - x[1] * h);
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn size_mismatch_rejected() {
        let g = Grid::unit(1, 8).unwrap();
        assert!(matches!(
            Field::analyze(g, &[C64::default(); 4]),
            Err(Error::SizeMismatch { expected: 8, got: 4 })
        ));
    }

    #[test]
    fn inverse_laplacian_single_mode() {
        let g = Grid::unit(2, 8).unwrap();
        let f = Field::single_mode(g, &[0, 2], C64::new(1.0, 0.0)).unwrap();
        let out = f.inverse_laplacian();
        assert!((out.coeff_at(&[0, 2]) - C64::new(0.25, 0.0)).norm() < 1e-15);
        let dc = Field::single_mode(g, &[0, 0], C64::new(1.0, 0.0)).unwrap();
        assert!(dc.abs_grad(-2.0).is_zero());
    }

    #[test]
    fn non_finite_symbol_rejected_only_on_support() {
        let g = Grid::unit(1, 8).unwrap();
        let f = Field::single_mode(g, &[1], C64::new(1.0, 0.0)).unwrap();
        let sym = |xi: &[f64]| C64::new(1.0 / xi[0].abs(), 0.0);
        assert!(f.apply_symbol(sym).is_ok());
        let dc = Field::single_mode(g, &[0], C64::new(1.0, 0.0)).unwrap();
        assert!(matches!(dc.apply_symbol(sym), Err(Error::NonFiniteSymbol(_))));
    }

    #[test]
    fn large_grid_round_trip() {
        let g = Grid::new(2, 256, 10.0).unwrap();
        let f = random_field(&g, 3, None);
        let back = Field::analyze(g, &f.synthesize()).unwrap();
        assert!(rel_err(back.coeffs(), f.coeffs()) < 1e-12);
    }
}
