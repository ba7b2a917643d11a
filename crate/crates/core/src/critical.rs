//! The critical case `r = d/2`: the two-parameter smallness quantity and the
//! decay of Picard terms at regularity `s = d/2 − 2 − ε₀`.

use crate::duhamel::picard_series;
use crate::error::{Error, Result};
use crate::grid::{Field, TimeGrid};
use crate::lp::{Projector, ProjectorKind};
use crate::norms::lp_norm;
use crate::potentials::Potential;

/// Default regularity gap `ε₀`.
pub const EPS0: f64 = 0.05;

/// `s = d/2 − 2 − ε₀`.
pub fn critical_regularity(dim: usize, eps0: f64) -> f64 {
    dim as f64 / 2.0 - 2.0 - eps0
}

/// `ε(M₀, N₀) = ‖P_{≥M₀}η‖_{L^{d/2}} + (M₀/N₀)^β ‖η‖_{L^{d/2}}`.
pub fn critical_smallness(eta: &Potential, m0: f64, n0: f64, beta: f64) -> Result<f64> {
    if m0 > n0 {
        return Err(Error::InvalidParameter(format!("M0 = {m0} exceeds N0 = {n0}")));
    }
    let p = eta.grid().dim() as f64 / 2.0;
    let high = Projector::new(m0, ProjectorKind::Ge)?.apply(eta.field());
    if !crate::grid::is_dyadic(n0) {
        return Err(Error::NotDyadic(n0));
    }
    let tail = if high.is_zero() { 0.0 } else { lp_norm(&high, p)? };
    Ok(tail + (m0 / n0).powf(beta) * eta.lp_norm(p)?)
}

/// Largest `T` with `T^{1/q̃′−1/2} N₀^{1−s} + T^{1/2} N₀ ≤ 1`, where
/// `q̃ = 2/(d/2 − 1 − ε₀)`, found by bisection in `ln T`.
pub fn time_cap(dim: usize, n0: f64, eps0: f64) -> Result<f64> {
    let d = dim as f64;
    let denom = d / 2.0 - 1.0 - eps0;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter(format!("no Strichartz exponent for d = {dim}, ε₀ = {eps0}")));
    }
    let q = 2.0 / denom;
    let e = (1.0 - 1.0 / q) - 0.5;
    if !(e > 0.0) {
        return Err(Error::InvalidParameter(format!("time exponent {e} not positive")));
    }
    let s = critical_regularity(dim, eps0);
    let lhs = |t: f64| t.powf(e) * n0.powf(1.0 - s) + t.sqrt() * n0;
    let (mut lo, mut hi) = (-200.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lhs(mid.exp()) <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.exp())
}

/// `‖I_n(T)‖_{H^s}` for `n = 0..=terms` with `s = d/2 − 2 − ε₀`.
pub fn critical_picard_decay(
    eta: &Potential,
    v0: &Field,
    tg: &TimeGrid,
    m0: f64,
    n0: f64,
    terms: usize,
) -> Result<Vec<f64>> {
    critical_picard_decay_with(eta, v0, tg, m0, n0, terms, EPS0)
}

pub fn critical_picard_decay_with(
    eta: &Potential,
    v0: &Field,
    tg: &TimeGrid,
    m0: f64,
    n0: f64,
    terms: usize,
    eps0: f64,
) -> Result<Vec<f64>> {
    let d = eta.grid().dim();
    if !(d == 3 || d == 4) || (eta.r() - d as f64 / 2.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "configuration not critical: d = {d}, r = {}",
            eta.r()
        )));
    }
    if m0 > n0 {
        return Err(Error::InvalidParameter(format!("M0 = {m0} exceeds N0 = {n0}")));
    }
    let cap = time_cap(d, n0, eps0)?;
    if tg.t_final() > cap * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "final time {} exceeds the cap {cap} for N0 = {n0}",
            tg.t_final()
        )));
    }
    Ok(picard_series(eta, v0, tg, terms, critical_regularity(d, eps0))?.final_norms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::potentials::{bump_potential, Band};
    use crate::random::random_field;

    #[test]
    fn smallness_basics() {
        let g = Grid::unit(3, 16).unwrap();
        assert_eq!(critical_smallness(&Potential::zero(g), 2.0, 8.0, 1.0).unwrap(), 0.0);
        // Spectral support below 2·(1 + margin) < 4 = M₀.
        let eta = bump_potential(&g, 1.0, 1.5, Band::HalfToTwo).unwrap();
        let full = eta.lp_norm(1.5).unwrap();
        let v = critical_smallness(&eta, 4.0, 16.0, 1.0).unwrap();
        assert!((v - full / 4.0).abs() < 1e-14 * full);
        let v4 = critical_smallness(&eta, 4.0, 64.0, 1.0).unwrap();
        assert!(v4 < v);
        assert!(critical_smallness(&eta, 8.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn cap_solves_constraint() {
        for d in [3, 4] {
            let s = critical_regularity(d, EPS0);
            let t = time_cap(d, 16.0, EPS0).unwrap();
            let q = 2.0 / (d as f64 / 2.0 - 1.0 - EPS0);
            let e = 0.5 - 1.0 / q;
            let lhs = t.powf(e) * 16f64.powf(1.0 - s) + t.sqrt() * 16.0;
            assert!((lhs - 1.0).abs() < 1e-9);
            assert!(time_cap(d, 64.0, EPS0).unwrap() < t);
        }
    }

    #[test]
    fn free_terms_vanish() {
        let g = Grid::unit(3, 8).unwrap();
        let mut eta = Potential::zero(g);
        eta = Potential::from_field(eta.field().clone(), 1.5);
        let v0 = random_field(&g, 1, None);
        let tg = TimeGrid::new(time_cap(3, 16.0, EPS0).unwrap(), 4).unwrap();
        let norms = critical_picard_decay(&eta, &v0, &tg, 4.0, 16.0, 3).unwrap();
        assert!(norms[0] > 0.0 && norms[1..].iter().all(|&x| x == 0.0));
        let bad = Potential::from_field(Field::zeros(g), 2.0);
        assert!(critical_picard_decay(&bad, &v0, &tg, 4.0, 16.0, 2).is_err());
    }
}
