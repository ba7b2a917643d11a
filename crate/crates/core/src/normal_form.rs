//! Normal-form machinery: the non-resonant multiplier `m`, the bilinear
//! transform `B`, the resonance term `R`, the cascade operators `T_N`, and
//! residual checks of the identities they satisfy.

use crate::duhamel::{cumulative_trapezoid, interaction_integrand, trapezoid};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, ProductMode, TimeGrid, Trajectory};
use crate::lp::{block, smooth_cutoff, smooth_cutoff_reflected, ProjectorKind, Projector, SEPARATION};
use crate::potentials::Potential;
use crate::random::random_field;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The multiplier
/// `m(ξ₁,ξ₂) = ⟨ξ⟩^α ⟨ξ₁⟩^{2−α} / (|ξ|² − |ξ₂|²) · φ_{≥N₀}(|ξ|) · φ(32|ξ₂|/|ξ|)`,
/// `ξ = ξ₁ + ξ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub alpha: f64,
    pub n0: f64,
}

impl MultiplierSpec {
    pub fn new(alpha: f64, n0: f64) -> Result<Self> {
        if !crate::grid::is_dyadic(n0) {
            return Err(Error::NotDyadic(n0));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("regularity shift {alpha}")));
        }
        Ok(Self { alpha, n0 })
    }

    /// The two cutoffs `φ_{≥N₀}(|ξ|) φ(32|ξ₂|/|ξ|)` from `|ξ|²` and `|ξ₂|²`.
    #[inline]
    pub fn cutoff(&self, q: f64, q2: f64) -> f64 {
        if q == 0.0 {
            return 0.0;
        }
        let r = q.sqrt();
        let hi = smooth_cutoff_reflected(r / self.n0);
        if hi == 0.0 {
            return 0.0;
        }
        hi * smooth_cutoff(SEPARATION * q2.sqrt() / r)
    }

    /// `m` from `|ξ|²`, `|ξ₁|²`, `|ξ₂|²`.
    #[inline]
    pub fn eval_sq(&self, q: f64, q1: f64, q2: f64) -> f64 {
        let c = self.cutoff(q, q2);
        if c == 0.0 {
            return 0.0;
        }
        (1.0 + q).powf(self.alpha / 2.0) * (1.0 + q1).powf(1.0 - self.alpha / 2.0) / (q - q2) * c
    }
}

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum()
}

/// `m(ξ₁, ξ₂)`; zero off the cutoff support.
pub fn nf_multiplier(xi1: &[f64], xi2: &[f64], spec: &MultiplierSpec) -> f64 {
    let xi: Vec<f64> = xi1.iter().zip(xi2).map(|(a, b)| a + b).collect();
    spec.eval_sq(sq(&xi), sq(xi1), sq(xi2))
}

/// Output-driven `L⁻ᵈ Σ_{ξ₁+ξ₂=ξ} kern(|ξ|², |ξ₁|², |ξ₂|²) f̂(ξ₁) ĝ(ξ₂)`.
///
/// In periodic mode `ξ₁` is the wrapped lattice frequency, so the sum is the
/// circular convolution; in padded mode pairs whose `ξ₁` leaves the lattice
/// are skipped, which is the truncated linear convolution.
fn bilinear_sum(f: &Field, g: &Field, mode: ProductMode, kern: impl Fn(f64, f64, f64) -> f64 + Sync) -> Result<Field> {
    let grid = *f.grid();
    grid.check_same(g.grid())?;
    let d = grid.dim();
    let supp: Vec<([i64; 5], f64, C64)> = g
        .support()
        .into_iter()
        .map(|i| (grid.wavenumbers(i), grid.freq_sq(i), g.coeffs()[i]))
        .collect();
    if supp.is_empty() || f.is_zero() {
        return Ok(Field::zeros(grid));
    }
    let fc = f.coeffs();
    let w = 1.0 / grid.volume();
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
                if c1.re == 0.0 && c1.im == 0.0 {
                    continue;
                }
                let m = kern(q, grid.freq_sq(idx), *q2);
                if m != 0.0 {
                    acc += c1 * c2 * m;
                }
            }
            acc * w
        })
        .collect();
    Ok(Field::from_coeffs_unchecked(grid, coeffs))
}

/// `B(f, g)` with the padded (linear) convolution.
pub fn bilinear_transform(f: &Field, g: &Field, spec: &MultiplierSpec) -> Result<Field> {
    bilinear_transform_with(f, g, spec, ProductMode::Padded)
}

pub fn bilinear_transform_with(f: &Field, g: &Field, spec: &MultiplierSpec, mode: ProductMode) -> Result<Field> {
    bilinear_sum(f, g, mode, |q, q1, q2| spec.eval_sq(q, q1, q2))
}

/// The non-resonant part of `ηu` cut out by the multiplier's support,
/// `L⁻ᵈ Σ φ_{≥N₀}(|ξ|) φ(32|ξ₂|/|ξ|) η̂(ξ₁) û(ξ₂)`.
pub fn nonresonant_product(eta: &Potential, u: &Field, spec: &MultiplierSpec, mode: ProductMode) -> Result<Field> {
    bilinear_sum(eta.field(), u, mode, |q, _, q2| spec.cutoff(q, q2))
}

/// `P_{≤N/64} u` for every dyadic output scale `N`, i.e. the input scales
/// `M` with `32M < N`.
fn low_input(u: &Field, n: f64) -> Field {
    if n < 64.0 {
        Field::zeros(*u.grid())
    } else {
        u.apply_radial(|r| smooth_cutoff(64.0 * r / n))
    }
}

/// `R(η,u) = P_{≤N₀}(ηu) + P_{≥N₀} Σ_N Σ_{M ≳ N} P_N(η P_M u)` with the
/// periodic product. The inner sum over `M ≥ N/32` is `u − P_{≤N/64}u`.
pub fn resonance_term(eta: &Potential, u: &Field, n0: f64) -> Result<Field> {
    let (res, _) = resonance_split(eta, u, n0)?;
    Ok(res)
}

/// The complement of [`resonance_term`]: `P_{≥N₀} Σ_N P_N(η P_{≤N/64} u)`.
pub fn nonresonant_remainder(eta: &Potential, u: &Field, n0: f64) -> Result<Field> {
    let (_, rest) = resonance_split(eta, u, n0)?;
    Ok(rest)
}

fn resonance_split(eta: &Potential, u: &Field, n0: f64) -> Result<(Field, Field)> {
    let grid = *u.grid();
    grid.check_same(eta.grid())?;
    let low = Projector::new(n0, ProjectorKind::Le)?;
    let high = Projector::new(n0, ProjectorKind::Ge)?;
    let full = eta.multiply(u);
    let mut res = low.apply(&full);
    let mut rest = Field::zeros(grid);
    for n in grid.dyadic_scales() {
        let lo = low_input(u, n);
        let part = if lo.is_zero() { Field::zeros(grid) } else { eta.multiply(&lo) };
        let near = full.sub(&part);
        res = res.add(&high.apply(&block(&near, n)));
        rest = rest.add(&high.apply(&block(&part, n)));
    }
    Ok((res, rest))
}

/// Relative `H⁰` residual at the final time of the normal-form identity for
/// `w = ⟨∇⟩^α u`:
///
/// `w(T) = e^{iTΔ}⟨∇⟩^α u₀ − e^{iTΔ}B(η̃, u₀) + B(η̃, u(T))
///        + i∫₀ᵀ e^{i(T−ρ)Δ}⟨∇⟩^α R dρ − i∫₀ᵀ e^{i(T−ρ)Δ}B(η̃, ηu) dρ`,
///
/// where `η̃ = ⟨∇⟩^{α−2}η` and `R = ηu − (non-resonant part)`. All products
/// are periodic and both integrals use the trapezoid rule on the trajectory's
/// time grid.
pub fn decomposition_residual(eta: &Potential, u_traj: &Trajectory, u0: &Field, alpha: f64, n0: f64) -> Result<f64> {
    let grid = *u0.grid();
    grid.check_same(eta.grid())?;
    grid.check_same(u_traj.grid())?;
    let spec = MultiplierSpec::new(alpha, n0)?;
    let tg = *u_traj.time();
    let t = tg.t_final();
    let mode = ProductMode::Periodic;
    let eta_t = eta.field().bessel(alpha - 2.0);
    let b = |g: &Field| bilinear_transform_with(&eta_t, g, &spec, mode);

    let lhs = u_traj.last().bessel(alpha);
    let mut rhs = u0.bessel(alpha).propagate_free(t);
    rhs = rhs.sub(&b(u0)?.propagate_free(t));
    rhs = rhs.add(&b(u_traj.last())?);

    let nodes = tg.nodes();
    let pieces: Vec<(Field, Field)> = nodes
        .par_iter()
        .zip(u_traj.states())
        .map(|(&rho, u)| {
            let prod = eta.multiply(u);
            let nr = nonresonant_product(eta, u, &spec, mode)?;
            let res = prod.sub(&nr).bessel(alpha).propagate_free(t - rho);
            let nf = b(&prod)?.propagate_free(t - rho);
            Ok((res, nf))
        })
        .collect::<Result<_>>()?;
    let (res, nf): (Vec<Field>, Vec<Field>) = pieces.into_iter().unzip();
    let i = C64::i();
    rhs.axpy(i, &trapezoid(&tg, &res));
    rhs.axpy(-i, &trapezoid(&tg, &nf));
    Ok(relative(&lhs.sub(&rhs), &lhs))
}

fn relative(err: &Field, reference: &Field) -> f64 {
    let den = reference.l2_norm();
    let num = err.l2_norm();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Thresholds of the cascade operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeSpec {
    pub n0: f64,
    /// Secondary threshold for the critical smallness quantity, `M₀ ≤ N₀`.
    pub m0: f64,
    /// Iteration depth.
    pub k: usize,
    pub r: f64,
}

impl CascadeSpec {
    pub fn new(n0: f64, m0: f64, k: usize, r: f64) -> Result<Self> {
        for v in [n0, m0] {
            if !crate::grid::is_dyadic(v) {
                return Err(Error::NotDyadic(v));
            }
        }
        if m0 > n0 {
            return Err(Error::InvalidParameter(format!("M0 = {m0} exceeds N0 = {n0}")));
        }
        Ok(Self { n0, m0, k, r })
    }

    /// `max(32N, N₀)`, the lowest scale kept by `T_N`.
    pub fn lowest_kept(&self, n: f64) -> f64 {
        (SEPARATION * n).max(self.n0)
    }
}

/// `Q_N = Σ_{M ≫ N, M ≥ N₀} P_M = Id − P_{≤M*/2}` with `M* = max(32N, N₀)`.
fn high_part(f: &Field, spec: &CascadeSpec, n: f64) -> Field {
    let m = spec.lowest_kept(n);
    f.apply_radial(|r| 1.0 - smooth_cutoff(2.0 * r / m))
}

/// `T_N f = η |∇|⁻² Q_N f`.
fn cascade_step(eta: &Potential, f: &Field, n: f64, spec: &CascadeSpec) -> Field {
    eta.multiply(&high_part(f, spec, n).inverse_laplacian())
}

fn cascade_power(eta: &Potential, f: &Field, n: f64, spec: &CascadeSpec, k: usize) -> Field {
    let mut g = f.clone();
    for _ in 0..k {
        g = cascade_step(eta, &g, n, spec);
    }
    g
}

/// `T_N^k f` with `k = spec.k`.
pub fn cascade_apply(eta: &Potential, f: &Field, n: f64, spec: &CascadeSpec) -> Result<Field> {
    f.grid().check_same(eta.grid())?;
    if !crate::grid::is_dyadic(n) {
        return Err(Error::NotDyadic(n));
    }
    Ok(cascade_power(eta, f, n, spec, spec.k))
}

/// Number of normalized power iterations before ratios are recorded.
pub const BURN_IN: usize = 8;

/// Largest observed `‖T_N^k f‖ / ‖T_N^{k−1} f‖` in `L²` over `samples` random
/// fields, `k = 1..=spec.k`, and the distinct operators `T_N` (which depend on
/// `N` only through `max(32N, N₀)`). Each field first runs [`BURN_IN`]
/// normalized iterations so the ratios track the operator norm.
pub fn cascade_contraction_ratio(eta: &Potential, spec: &CascadeSpec, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParameter("contraction ratio needs at least one sample".into()));
    }
    if eta.is_zero() {
        return Ok(0.0);
    }
    let grid = *eta.grid();
    let nmax = grid.nmax();
    let mut scales = vec![1.0];
    while spec.lowest_kept(*scales.last().unwrap()) < nmax {
        let next = scales.last().unwrap() * 2.0;
        if spec.lowest_kept(next) == spec.lowest_kept(*scales.last().unwrap()) {
            *scales.last_mut().unwrap() = next;
        } else {
            scales.push(next);
        }
    }
    let jobs: Vec<(f64, u64)> = scales
        .iter()
        .flat_map(|&n| (0..samples as u64).map(move |s| (n, s)))
        .collect();
    let worst = jobs
        .par_iter()
        .map(|&(n, s)| {
            let mut f = random_field(&grid, seed.wrapping_add(s), None);
            for _ in 0..BURN_IN {
                let g = cascade_step(eta, &f, n, spec);
                let norm = g.l2_norm();
                if norm == 0.0 {
                    return 0.0;
                }
                f = g.scale_real(1.0 / norm);
            }
            let mut best: f64 = 0.0;
            for _ in 0..spec.k.max(1) {
                let g = cascade_step(eta, &f, n, spec);
                let (a, b) = (g.l2_norm(), f.l2_norm());
                if a == 0.0 {
                    break;
                }
                best = best.max(a / b);
                f = g.scale_real(1.0 / a);
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// Per-step ratios `‖T_N^k f‖/‖T_N^{k−1} f‖` for `k = 1..=depth`, after burn-in,
/// for one random field and one `N`.
pub fn cascade_step_ratios(eta: &Potential, spec: &CascadeSpec, n: f64, depth: usize, seed: u64) -> Vec<f64> {
    let mut f = random_field(eta.grid(), seed, None);
    let mut out = Vec::with_capacity(depth);
    for k in 0..BURN_IN + depth {
        let g = cascade_step(eta, &f, n, spec);
        let (a, b) = (g.l2_norm(), f.l2_norm());
        if a == 0.0 {
            out.resize(depth, 0.0);
            return out;
        }
        if k >= BURN_IN {
            out.push(a / b);
        }
        f = g.scale_real(1.0 / a);
    }
    out
}

/// The terms of `I_{n,k} = J_{n,k} + I_{n,k+1}` at the final time, with
/// `J_{n,k} = low + mid + bulk + boundary`:
///
/// * `low  = i∫ e^{−iρΔ} Σ_N P_N T_N^k(η e^{iρΔ} P_{≤N₀/2} I)`,
/// * `mid  = i∫ e^{−iρΔ} Σ_N P_N T_N^k(η e^{iρΔ} (P_{≤16N} − P_{≤N₀/2}) I)` (only `32N > N₀`),
/// * `bulk = i|∇|² ∫ e^{−iρΔ} Σ_N P_N T_N^k(η |∇|⁻² e^{iρΔ} Q_N I)`,
/// * `boundary = −e^{−iTΔ} Σ_N P_N T_N^k(η |∇|⁻² e^{iTΔ} Q_N I(T))`,
///
/// where `I = I_{n−k−1}`. For `k = n − 1` the next term is replaced by the
/// tail `Σ_N P_N T_N^n v₀`.
#[derive(Clone, Debug)]
pub struct CascadeDecomposition {
    pub n: usize,
    pub k: usize,
    pub whole: Field,
    pub low: Field,
    pub mid: Field,
    pub bulk: Field,
    pub boundary: Field,
    /// `I_{n,k+1}(T)`, or the tail `Σ_N P_N T_N^n v₀` when `k = n − 1`.
    pub next: Field,
}

impl CascadeDecomposition {
    pub fn reassembled(&self) -> Field {
        self.low.add(&self.mid).add(&self.bulk).add(&self.boundary).add(&self.next)
    }

    pub fn residual(&self) -> f64 {
        relative(&self.whole.sub(&self.reassembled()), &self.whole)
    }
}

struct Cascade<'a> {
    eta: &'a Potential,
    spec: CascadeSpec,
    scales: Vec<f64>,
}

impl<'a> Cascade<'a> {
    /// `Σ_N P_N T_N^k (η · pre_N(g))`.
    fn apply(&self, g: &Field, k: usize, pre: impl Fn(&Field, f64) -> Field) -> Field {
        let mut acc = Field::zeros(*g.grid());
        for &n in &self.scales {
            let h = pre(g, n);
            if h.is_zero() {
                continue;
            }
            let inner = self.eta.multiply(&h);
            acc = acc.add(&block(&cascade_power(self.eta, &inner, n, &self.spec, k), n));
        }
        acc
    }

    fn low(&self, g: &Field, _n: f64) -> Field {
        g.apply_radial(|r| smooth_cutoff(2.0 * r / self.spec.n0))
    }

    fn mid(&self, g: &Field, n: f64) -> Field {
        if SEPARATION * n <= self.spec.n0 {
            return Field::zeros(*g.grid());
        }
        let n0 = self.spec.n0;
        g.apply_radial(|r| smooth_cutoff(r / (16.0 * n)) - smooth_cutoff(2.0 * r / n0))
    }

    fn high(&self, g: &Field, n: f64) -> Field {
        high_part(g, &self.spec, n).inverse_laplacian()
    }

    /// `i ∫₀ᵀ e^{−iρΔ} F(e^{iρΔ} I(ρ)) dρ` by the trapezoid rule.
    fn integrate(&self, tg: &TimeGrid, source: &Trajectory, f: impl Fn(&Field) -> Field + Sync) -> Field {
        let nodes = tg.nodes();
        let vals: Vec<Field> = nodes
            .par_iter()
            .zip(source.states())
            .map(|(&rho, s)| f(&s.propagate_free(rho)).propagate_free(-rho))
            .collect();
        trapezoid(tg, &vals).scale(C64::i())
    }
}

/// Picard terms `I₀ = v₀`, `I_j = i∫₀ᵗ e^{−iρΔ}(η e^{iρΔ} I_{j−1}) dρ` for `j ≤ upto`.
fn picard_terms(eta: &Potential, v0: &Field, tg: &TimeGrid, upto: usize) -> Vec<Trajectory> {
    let mut list = vec![Trajectory::constant(*tg, v0)];
    let nodes = tg.nodes();
    for _ in 0..upto {
        let prev = list.last().unwrap();
        let vals: Vec<Field> = nodes
            .par_iter()
            .zip(prev.states())
            .map(|(&rho, s)| interaction_integrand(eta, s, rho).scale(C64::i()))
            .collect();
        list.push(cumulative_trapezoid(tg, &vals));
    }
    list
}

/// Evaluate the terms of the `(n, k)` cascade recurrence on `tg`.
pub fn cascade_decomposition(
    eta: &Potential,
    v0: &Field,
    tg: &TimeGrid,
    n: usize,
    k: usize,
    spec: &CascadeSpec,
) -> Result<CascadeDecomposition> {
    if n == 0 || k >= n {
        return Err(Error::IndexRange(format!("cascade indices need 0 ≤ k < n, got n = {n}, k = {k}")));
    }
    v0.grid().check_same(eta.grid())?;
    let grid = *v0.grid();
    let cas = Cascade {
        eta,
        spec: *spec,
        scales: grid.dyadic_scales(),
    };
    let terms = picard_terms(eta, v0, tg, n - k);
    let src = &terms[n - k - 1];
    let t = tg.t_final();
    let whole = cas.integrate(tg, src, |w| cas.apply(w, k, |g, _| g.clone()));
    let low = cas.integrate(tg, src, |w| cas.apply(w, k, |g, m| cas.low(g, m)));
    let mid = cas.integrate(tg, src, |w| cas.apply(w, k, |g, m| cas.mid(g, m)));
    let bulk = cas
        .integrate(tg, src, |w| cas.apply(w, k, |g, m| cas.high(g, m)))
        .laplacian()
        .scale_real(-1.0);
    let boundary = cas
        .apply(&src.last().propagate_free(t), k, |g, m| cas.high(g, m))
        .propagate_free(-t)
        .scale_real(-1.0);
    let next = if k + 1 == n {
        cas.apply(v0, k, |g, m| cas.high(g, m))
    } else {
        let deeper = &terms[n - k - 2];
        cas.integrate(tg, deeper, |w| cas.apply(w, k + 1, |g, _| g.clone()))
    };
    Ok(CascadeDecomposition {
        n,
        k,
        whole,
        low,
        mid,
        bulk,
        boundary,
        next,
    })
}

/// Relative residual at the final time of the `(n, k)` recurrence. For
/// `k = 0` this also covers `I_n = I_{n,0}`; see [`first_step_residual`].
pub fn recurrence_residual(eta: &Potential, v0: &Field, tg: &TimeGrid, n: usize, k: usize, spec: &CascadeSpec) -> Result<f64> {
    Ok(cascade_decomposition(eta, v0, tg, n, k, spec)?.residual())
}

/// Relative residual of `I_n = I_{n,0}` at the final time.
pub fn first_step_residual(eta: &Potential, v0: &Field, tg: &TimeGrid, n: usize, spec: &CascadeSpec) -> Result<f64> {
    if n == 0 {
        return Err(Error::IndexRange("first-step identity needs n ≥ 1".into()));
    }
    let grid = *v0.grid();
    let cas = Cascade {
        eta,
        spec: *spec,
        scales: grid.dyadic_scales(),
    };
    let terms = picard_terms(eta, v0, tg, n);
    let split = cas.integrate(tg, &terms[n - 1], |w| cas.apply(w, 0, |g, _| g.clone()));
    Ok(relative(&terms[n].last().sub(&split), terms[n].last()))
}

/// `max (|ξ₁| + |ξ₂|) |Δ_h m|/h` over lattice pairs on the multiplier's
/// support, with forward differences of one lattice step along each axis of
/// either argument.
pub fn symbol_difference_bound(grid: &Grid, spec: &MultiplierSpec) -> f64 {
    let d = grid.dim();
    let h = grid.step();
    let pts: Vec<[f64; 5]> = (0..grid.len()).map(|i| grid.frequency(i)).collect();
    pts.par_iter()
        .map(|xi1| {
            let mut worst: f64 = 0.0;
            for xi2 in &pts {
                let m0 = nf_multiplier(&xi1[..d], &xi2[..d], spec);
                if m0 == 0.0 {
                    continue;
                }
                let scale = sq(&xi1[..d]).sqrt() + sq(&xi2[..d]).sqrt();
                for a in 0..d {
                    let mut p1 = *xi1;
                    p1[a] += h;
                    let mut p2 = *xi2;
                    p2[a] += h;
                    let d1 = (nf_multiplier(&p1[..d], &xi2[..d], spec) - m0) / h;
                    let d2 = (nf_multiplier(&xi1[..d], &p2[..d], spec) - m0) / h;
                    worst = worst.max(scale * d1.abs().max(d2.abs()));
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}
