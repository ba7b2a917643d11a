//! `A(u₀)(t)` for coordinate-product potential and data profiles.
//!
//! At a fixed time `ρ` the phase `ρ(|ξ|² − |ξ₂|²)` splits into a sum over
//! axes and both profiles are products, so the lattice convolution factorizes
//! into one-dimensional convolutions `g_i(ρ, ξ_i)`. The time integral uses
//! Gauss–Legendre nodes, so `Â(ξ) = C Σ_j w_j Π_i g_i(ρ_j, ξ_i)`, and weighted
//! norms with the equivalent weight `1 + Σ_i |ξ_i|^{2γ}` reduce to sums of
//! per-axis Gram matrices over node pairs.

use super::LowerBound;
use crate::error::{Error, Result};
use crate::potentials::{profile_amplitude, SeparableProfile};
use crate::quadrature::gauss_legendre;
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// One axis: values `g(ρ_j, ξ)` for every time node `j` and every output
/// wavenumber `k ∈ [−reach, reach]`.
#[derive(Clone, Debug)]
struct Axis {
    reach: i64,
    values: Vec<Vec<C64>>,
}

impl Axis {
    fn at(&self, j: usize, k: i64) -> C64 {
        if k.abs() > self.reach {
            C64::default()
        } else {
            self.values[j][(k + self.reach) as usize]
        }
    }
}

/// Separable evaluation of `A(u₀)(t)` on the lattice `step·Zᵈ`.
#[derive(Clone, Debug)]
pub struct SeparableDuhamel {
    step: f64,
    t: f64,
    constant: f64,
    weights: Vec<f64>,
    axes: Vec<Axis>,
}

impl SeparableDuhamel {
    /// `order` Gauss–Legendre nodes in time on the lattice of spacing `step`
    /// (torus period `2π/step`).
    pub fn new(eta: &SeparableProfile, data: &SeparableProfile, t: f64, step: f64, order: usize) -> Result<Self> {
        let d = eta.dim();
        if d == 0 || d > 5 || data.dim() != d {
            return Err(Error::Dimension(data.dim()));
        }
        if !(step > 0.0 && t >= 0.0) {
            return Err(Error::InvalidParameter("separable path needs step > 0 and t ≥ 0".into()));
        }
        let (x, w) = gauss_legendre(order);
        let nodes: Vec<f64> = x.iter().map(|xi| 0.5 * t * (xi + 1.0)).collect();
        let weights: Vec<f64> = w.iter().map(|wi| 0.5 * t * wi).collect();
        let axes = (0..d)
            .map(|i| {
                let ke = (eta.axis_reach(i) / step).floor() as i64;
                let ku = (data.axis_reach(i) / step).floor() as i64;
                let e: Vec<(i64, f64)> = (-ke..=ke)
                    .map(|k| (k, eta.axis(i, k as f64 * step)))
                    .filter(|p| p.1 != 0.0)
                    .collect();
                let u: Vec<(i64, f64)> = (-ku..=ku)
                    .map(|k| (k, data.axis(i, k as f64 * step)))
                    .filter(|p| p.1 != 0.0)
                    .collect();
                let reach = ke + ku;
                let values = nodes
                    .par_iter()
                    .map(|&rho| {
                        let mut out = vec![C64::default(); (2 * reach + 1) as usize];
                        for &(k2, uv) in &u {
                            let q2 = (k2 as f64 * step).powi(2);
                            for &(k1, ev) in &e {
                                let k = k1 + k2;
                                let q = (k as f64 * step).powi(2);
                                out[(k + reach) as usize] += C64::from_polar(ev * uv, rho * (q - q2));
                            }
                        }
                        out
                    })
                    .collect();
                Axis { reach, values }
            })
            .collect();
        // L⁻ᵈ (2π)^{2d} a_η a_u with L = 2π/step.
        let constant = (step / (2.0 * PI)).powi(d as i32) * profile_amplitude(d).powi(2) * eta.amp * data.amp;
        Ok(Self {
            step,
            t,
            constant,
            weights,
            axes,
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Lattice coefficient `Â(ξ)` at integer wavenumbers `k`.
    pub fn amplitude(&self, k: &[i64]) -> C64 {
        let mut acc = C64::default();
        for (j, w) in self.weights.iter().enumerate() {
            let mut prod = C64::new(*w, 0.0);
            for (i, axis) in self.axes.iter().enumerate() {
                prod *= axis.at(j, k[i]);
            }
            acc += prod;
        }
        acc * self.constant
    }

    /// Per-axis Gram sums `Σ_k ω(k) g(j,k) conj(g(j',k))` (or without the
    /// conjugate), restricted to `k` in `range`.
    fn gram(&self, i: usize, range: (i64, i64), conj: bool, weight: impl Fn(f64) -> f64) -> Vec<C64> {
        let axis = &self.axes[i];
        let nj = self.weights.len();
        let lo = range.0.max(-axis.reach);
        let hi = range.1.min(axis.reach);
        let mut out = vec![C64::default(); nj * nj];
        for k in lo..=hi {
            let w = weight(k as f64 * self.step);
            if w == 0.0 {
                continue;
            }
            for a in 0..nj {
                let ga = axis.at(a, k);
                for b in 0..nj {
                    let gb = axis.at(b, k);
                    out[a * nj + b] += ga * if conj { gb.conj() } else { gb } * w;
                }
            }
        }
        out
    }

    /// `L⁻ᵈ Σ_{ξ∈box} (1 + Σ_i |ξ_i|^{2γ}) F(Â(ξ))` where `F` is `|Â|²` or
    /// `(Re Â)²`, over the box `ranges` of integer wavenumbers.
    fn weighted_sum(&self, ranges: &[(i64, i64)], gamma: f64, real_part: bool) -> f64 {
        let d = self.dim();
        let nj = self.weights.len();
        let pair = |conj: bool| -> f64 {
            let plain: Vec<Vec<C64>> = (0..d).map(|i| self.gram(i, ranges[i], conj, |_| 1.0)).collect();
            let heavy: Vec<Vec<C64>> = (0..d)
                .map(|i| self.gram(i, ranges[i], conj, |x| x.abs().powf(2.0 * gamma)))
                .collect();
            let mut total = C64::default();
            for a in 0..nj {
                for b in 0..nj {
                    let idx = a * nj + b;
                    let base: C64 = plain.iter().map(|g| g[idx]).product();
                    let mut term = base;
                    for i in 0..d {
                        let mut p = heavy[i][idx];
                        for (l, g) in plain.iter().enumerate() {
                            if l != i {
                                p *= g[idx];
                            }
                        }
                        term += p;
                    }
                    total += term * self.weights[a] * self.weights[b];
                }
            }
            total.re
        };
        let abs2 = pair(true);
        let value = if real_part {
            // (Re z)² = (|z|² + Re z²)/2
            0.5 * (abs2 + pair(false))
        } else {
            abs2
        };
        let l = 2.0 * PI / self.step;
        value * self.constant * self.constant / l.powi(d as i32)
    }

    fn full_ranges(&self) -> Vec<(i64, i64)> {
        self.axes.iter().map(|a| (-a.reach, a.reach)).collect()
    }

    /// `‖A(u₀)(t)‖` with the weight `1 + Σ_i |ξ_i|^{2γ}`, comparable to `⟨ξ⟩^{2γ}`.
    pub fn sobolev_norm(&self, gamma: f64) -> f64 {
        self.weighted_sum(&self.full_ranges(), gamma, false).max(0.0).sqrt()
    }

    fn box_ranges(&self, lo: &[f64], hi: &[f64]) -> Vec<(i64, i64)> {
        lo.iter()
            .zip(hi)
            .map(|(l, h)| ((l / self.step).ceil() as i64, (h / self.step).floor() as i64))
            .collect()
    }

    /// Real-part lower bound over the signed box `lo_i ≤ ξ_i ≤ hi_i`.
    pub fn lower_bound(&self, lo: &[f64], hi: &[f64], gamma: f64) -> Result<LowerBound> {
        let ranges = self.box_ranges(lo, hi);
        if ranges.iter().any(|(a, b)| a > b) || ranges.len() != self.dim() {
            return Err(Error::EmptyRegion("box holds no lattice points".into()));
        }
        let mut min_re = f64::INFINITY;
        let mut k = ranges.iter().map(|r| r.0).collect::<Vec<_>>();
        'outer: loop {
            min_re = min_re.min(self.amplitude(&k).re);
            for i in (0..k.len()).rev() {
                if k[i] < ranges[i].1 {
                    k[i] += 1;
                    continue 'outer;
                }
                k[i] = ranges[i].0;
            }
            break;
        }
        let norm = self.weighted_sum(&ranges, gamma, true).max(0.0).sqrt();
        Ok(LowerBound {
            min_re,
            norm_on_omega: norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duhamel::duhamel_kernel_apply;
    use crate::grid::Grid;
    use crate::potentials::{aniso_box_potential, aniso_box_profile, box_data, box_profile};

    fn equivalent_norm(f: &crate::grid::Field, gamma: f64) -> f64 {
        let g = f.grid();
        let mut s = 0.0;
        g.for_each_frequency(|i, xi| {
            let w = 1.0 + xi.iter().map(|x| x.abs().powf(2.0 * gamma)).sum::<f64>();
            s += w * f.coeffs()[i].norm_sqr();
        });
        (s / g.volume()).sqrt()
    }

    #[test]
    fn matches_lattice_path() {
        let grid = Grid::new(2, 128, 4.0 * PI).unwrap();
        let (m, n, r, lp, gamma) = (12.0, 2.0, 4.0, 1.0, 2.5);
        let t = 1.0 / (m * m);
        let eta = aniso_box_potential(&grid, m, n, r).unwrap();
        let u0 = box_data(&grid, lp, gamma).unwrap();
        let lattice = duhamel_kernel_apply(&eta, &u0, t).unwrap();
        let sep = SeparableDuhamel::new(&aniso_box_profile(2, m, n, r), &box_profile(2, lp, gamma), t, grid.step(), 24).unwrap();
        for i in lattice.support().into_iter().step_by(5) {
            let k = grid.wavenumbers(i);
            let a = sep.amplitude(&k[..2]);
            assert!((a - lattice.coeffs()[i]).norm() <= 1e-12 * lattice.max_abs());
        }
        let nl = equivalent_norm(&lattice, gamma);
        let ns = sep.sobolev_norm(gamma);
        assert!((nl - ns).abs() < 1e-10 * nl, "{nl} {ns}");
        // Ω-restricted real-part norm against direct lattice summation.
        let lo = [12.5, 1.5];
        let hi = [14.5, 4.0];
        let lb = sep.lower_bound(&lo, &hi, gamma).unwrap();
        let mut s = 0.0;
        let mut mn = f64::INFINITY;
        grid.for_each_frequency(|i, xi| {
            if xi[0] >= lo[0] && xi[0] <= hi[0] && xi[1] >= lo[1] && xi[1] <= hi[1] {
                let re = lattice.coeffs()[i].re;
                mn = mn.min(re);
                let w = 1.0 + xi.iter().map(|x| x.abs().powf(2.0 * gamma)).sum::<f64>();
                s += w * re * re;
            }
        });
        let direct = (s / grid.volume()).sqrt();
        assert!(direct > 1e-3 * nl);
        assert!((lb.norm_on_omega - direct).abs() < 1e-10 * direct, "{} {direct}", lb.norm_on_omega);
        assert!((lb.min_re - mn).abs() < 1e-12 * lattice.max_abs());
    }
}
