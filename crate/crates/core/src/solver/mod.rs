//! Reference time evolution for `i∂ₜu + Δu + ηu = 0`: a Strang split-step
//! integrator, a dense matrix-exponential oracle, and the time-derivative
//! pipeline that recovers `u` from `v = ∂ₜu`.

mod expm;

pub use expm::{expm, lu_solve};

use crate::error::{Error, Result};
use crate::grid::{pointwise_multiply, Field, Grid, ProductMode, TimeGrid, Trajectory};
use crate::lp::{Projector, ProjectorKind};
use crate::norms::sobolev_norm;
use crate::potentials::Potential;
use crate::random::random_field;
use crate::C64;
use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest number of modes the dense oracle accepts.
pub const DENSE_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Strang,
    DenseExpm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub method: Method,
}

impl SolverConfig {
    pub fn new(dt: f64, method: Method) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
        }
        Ok(Self { dt, method })
    }

    /// The uniform grid on `[0, T]` whose step is the largest not exceeding `dt`.
    pub fn time_grid(&self, t: f64) -> Result<TimeGrid> {
        let k = (t / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        TimeGrid::new(t, k)
    }
}

/// Solve on `[0, T]` with the configured method, sampling every step.
pub fn solve(eta: &Potential, u0: &Field, t: f64, cfg: &SolverConfig) -> Result<Trajectory> {
    match cfg.method {
        Method::Strang => split_step_solve(eta, u0, t, cfg),
        Method::DenseExpm => {
            let tg = cfg.time_grid(t)?;
            dense_trajectory(eta, u0, &tg)
        }
    }
}

/// Strang splitting: half potential phase `e^{iη dt/2}`, exact kinetic step
/// `e^{i dt Δ}`, half potential phase.
pub fn split_step_solve(eta: &Potential, u0: &Field, t: f64, cfg: &SolverConfig) -> Result<Trajectory> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("final time {t} must be positive")));
    }
    u0.grid().check_same(eta.grid())?;
    let tg = cfg.time_grid(t)?;
    split_step_on(eta, u0, &tg)
}

/// Strang splitting on a given time grid.
pub fn split_step_on(eta: &Potential, u0: &Field, tg: &TimeGrid) -> Result<Trajectory> {
    u0.grid().check_same(eta.grid())?;
    let h = tg.step();
    let half: Vec<C64> = eta
        .samples()
        .iter()
        .map(|&e| (C64::i() * e * (h / 2.0)).exp())
        .collect();
    let grid = *u0.grid();
    let phase = |f: &Field| -> Field {
        let mut s = f.synthesize();
        s.iter_mut().zip(&half).for_each(|(a, b)| *a *= b);
        Field::analyze_unchecked(grid, s)
    };
    let mut states = Vec::with_capacity(tg.node_count());
    let mut u = u0.clone();
    states.push(u.clone());
    for _ in 0..tg.intervals() {
        u = if eta.is_zero() {
            u.propagate_free(h)
        } else {
            phase(&phase(&u).propagate_free(h))
        };
        states.push(u.clone());
    }
    Trajectory::new(*tg, states)
}

/// Spectral matrix of `Δ + η` with the periodic product:
/// `D̂[k][j] = −|ξ_k|² δ_kj + L⁻ᵈ η̂(k − j)`.
pub fn dense_generator(eta: &Potential) -> Result<Array2<C64>> {
    let grid = *eta.grid();
    let n = grid.len();
    if n > DENSE_CAP {
        return Err(Error::DenseTooLarge(n));
    }
    let d = grid.dim();
    let w = 1.0 / grid.volume();
    let ec = eta.field().coeffs();
    let mut m = Array2::<C64>::zeros((n, n));
    let mut diff = [0i64; 5];
    for k in 0..n {
        let a = grid.wavenumbers(k);
        for j in 0..n {
            let b = grid.wavenumbers(j);
            for x in 0..d {
                diff[x] = a[x] - b[x];
            }
            m[[k, j]] = ec[grid.flat_index_wrapped(&diff[..d])] * w;
        }
        m[[k, k]] -= grid.freq_sq(k);
    }
    Ok(m)
}

/// `exp(itD̂)` materialized as a dense matrix on spectral coefficients.
#[derive(Clone, Debug)]
pub struct DensePropagator {
    grid: Grid,
    t: f64,
    matrix: Array2<C64>,
}

impl DensePropagator {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        self.grid.check_same(f.grid())?;
        let v = Array1::from(f.coeffs().to_vec());
        let out = self.matrix.dot(&v);
        Field::from_coeffs(self.grid, out.to_vec())
    }
}

pub fn dense_propagator(eta: &Potential, grid: &Grid, t: f64) -> Result<DensePropagator> {
    grid.check_same(eta.grid())?;
    let mut a = dense_generator(eta)?;
    a.mapv_inplace(|z| z * C64::new(0.0, t));
    Ok(DensePropagator {
        grid: *grid,
        t,
        matrix: expm(&a)?,
    })
}

/// The exact flow sampled on `tg`, stepping with one dense propagator.
pub fn dense_trajectory(eta: &Potential, u0: &Field, tg: &TimeGrid) -> Result<Trajectory> {
    let p = dense_propagator(eta, u0.grid(), tg.step())?;
    let mut states = Vec::with_capacity(tg.node_count());
    let mut u = u0.clone();
    states.push(u.clone());
    for _ in 0..tg.intervals() {
        u = p.apply(&u)?;
        states.push(u.clone());
    }
    Trajectory::new(*tg, states)
}

/// `v₀ = i(Δu₀ + ηu₀)`, the initial value of `∂ₜu`, with the padded product.
pub fn time_derivative_data(eta: &Potential, u0: &Field) -> Result<Field> {
    time_derivative_data_with(eta, u0, ProductMode::Padded)
}

pub fn time_derivative_data_with(eta: &Potential, u0: &Field, mode: ProductMode) -> Result<Field> {
    let prod = pointwise_multiply(eta.field(), u0, mode)?;
    Ok(u0.laplacian().add(&prod).scale(C64::i()))
}

/// The high-frequency map `u ↦ (−Δ)⁻¹ P_{≥N₀}(ηu)`.
fn high_map(eta: &Potential, u: &Field, high: &Projector) -> Field {
    high.apply(&eta.multiply(u)).inverse_laplacian()
}

/// Empirical `L²` operator norm of `u ↦ (−Δ)⁻¹P_{≥N₀}(ηu)` by normalized power
/// iteration from `samples` random fields (16 steps each, largest final ratio).
pub fn contraction_factor(eta: &Potential, n0: f64, samples: usize, seed: u64) -> Result<f64> {
    let high = Projector::new(n0, ProjectorKind::Ge)?;
    if eta.is_zero() {
        return Ok(0.0);
    }
    let worst = (0..samples.max(1) as u64)
        .into_par_iter()
        .map(|s| {
            let mut f = random_field(eta.grid(), seed.wrapping_add(s), None);
            let mut ratio = 0.0;
            for _ in 0..16 {
                let g = high_map(eta, &f, &high);
                let (a, b) = (g.l2_norm(), f.l2_norm());
                if a == 0.0 {
                    return 0.0;
                }
                ratio = a / b;
                f = g.scale_real(1.0 / a);
            }
            ratio
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// Recover `u` at every node from `v = ∂ₜu` by iterating
/// `u ← P_{<N₀}u_low + (−Δ)⁻¹P_{≥N₀}(iv + ηu)` until the relative `H²`
/// update drops below `tol`.
pub fn reconstruct_from_v(
    eta: &Potential,
    v_traj: &Trajectory,
    u_low_traj: &Trajectory,
    n0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Trajectory> {
    Ok(reconstruct_with_stats(eta, v_traj, u_low_traj, n0, tol, max_iter)?.0)
}

/// As [`reconstruct_from_v`], also returning the largest iteration count used.
pub fn reconstruct_with_stats(
    eta: &Potential,
    v_traj: &Trajectory,
    u_low_traj: &Trajectory,
    n0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Trajectory, usize)> {
    u_low_traj.check_time(v_traj.time())?;
    v_traj.grid().check_same(u_low_traj.grid())?;
    v_traj.grid().check_same(eta.grid())?;
    let high = Projector::new(n0, ProjectorKind::Ge)?;
    let low = Projector::new(n0, ProjectorKind::Le)?;
    let results: Vec<(Field, usize)> = v_traj
        .states()
        .par_iter()
        .zip(u_low_traj.states())
        .map(|(v, ul)| {
            let base = low.apply(ul);
            let forcing = high.apply(&v.scale(C64::i())).inverse_laplacian();
            if eta.is_zero() {
                return Ok((base.add(&forcing), 1));
            }
            let mut u = base.clone();
            let mut last = f64::INFINITY;
            for it in 1..=max_iter {
                let next = base.add(&forcing).add(&high_map(eta, &u, &high));
                let size = sobolev_norm(&next, 2.0);
                let upd = sobolev_norm(&next.sub(&u), 2.0);
                last = if size == 0.0 { upd } else { upd / size };
                u = next;
                if last < tol {
                    return Ok((u, it));
                }
                if !last.is_finite() {
                    break;
                }
            }
            Err(Error::NoConvergence {
                iterations: max_iter,
                last_update: last,
            })
        })
        .collect::<Result<_>>()?;
    let iters = results.iter().map(|r| r.1).max().unwrap_or(0);
    let states = results.into_iter().map(|r| r.0).collect();
    Ok((Trajectory::new(*v_traj.time(), states)?, iters))
}

#[cfg(test)]
mod tests;
