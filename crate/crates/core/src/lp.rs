//! Smooth cutoffs, Littlewood–Paley projectors and empirical testers for the
//! Bernstein, Schur and Triebel–Lizorkin estimates.

use crate::error::{Error, Result};
use crate::grid::{is_dyadic, Field, Grid};
use crate::norms;

/// Separation constant of the `≪` and `≫` comparisons: `X ≪ Y` iff `X ≤ Y/32`.
pub const SEPARATION: f64 = 32.0;

#[inline]
fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Radial bump: 1 on `[0, 1]`, 0 on `[2, ∞)`, a `C^∞` non-increasing
/// transition in between.
#[inline]
pub fn smooth_cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = psi(2.0 - r);
        a / (a + psi(r - 1.0))
    }
}

/// `1 − smooth_cutoff(r)`, evaluated without cancellation.
#[inline]
pub fn smooth_cutoff_reflected(r: f64) -> f64 {
    if r <= 1.0 {
        0.0
    } else if r >= 2.0 {
        1.0
    } else {
        let b = psi(r - 1.0);
        b / (psi(2.0 - r) + b)
    }
}

/// Annular indicator: 1 on `a ≤ x ≤ b`, 0 for `x ≤ a − 1/4` or `x ≥ b + 1/4`.
#[inline]
pub fn annular_cutoff(x: f64, a: f64, b: f64) -> f64 {
    let x = x.abs();
    if x < a {
        smooth_cutoff(1.0 + 4.0 * (a - x))
    } else if x > b {
        smooth_cutoff(1.0 + 4.0 * (x - b))
    } else {
        1.0
    }
}

/// A one-dimensional cutoff profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    /// The radial bump [`smooth_cutoff`].
    Phi,
    /// The annulus [`annular_cutoff`] with band `[a, b]`.
    Chi { a: f64, b: f64 },
}

impl Cutoff {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Cutoff::Phi => smooth_cutoff(r),
            Cutoff::Chi { a, b } => annular_cutoff(r, a, b),
        }
    }
}

/// Dyadic block `φ_N(r)`: `φ(r)` for `N = 1`, `φ(r/N) − φ(2r/N)` otherwise.
#[inline]
pub fn dyadic_block(n: f64, r: f64) -> f64 {
    if n <= 1.0 {
        smooth_cutoff(r)
    } else {
        smooth_cutoff(r / n) - smooth_cutoff(2.0 * r / n)
    }
}

/// The comparison variants of a dyadic projector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectorKind {
    /// `P_N`, the block `φ_N`.
    At,
    /// `P_{≤N}`, profile `φ(|ξ|/N)`.
    Le,
    /// `P_{<N} = P_{≤N/2}`, zero for `N = 1`.
    Lt,
    /// `P_{≪N}`, profile `φ(32|ξ|/N)`.
    Ll,
    /// `P_{≲N}`, profile `φ(|ξ|/(32N))`.
    Lesssim,
    /// `P_{≥N} = Id − P_{≤N}`.
    Ge,
    /// `P_{≫N} = Id − P_{≲N}`.
    Gg,
    /// `P_{≳N} = Id − P_{≪N}`.
    Gtrsim,
}

/// A projector at a dyadic scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projector {
    pub scale: f64,
    pub kind: ProjectorKind,
}

impl Projector {
    pub fn new(scale: f64, kind: ProjectorKind) -> Result<Self> {
        if !is_dyadic(scale) {
            return Err(Error::NotDyadic(scale));
        }
        Ok(Self { scale, kind })
    }

    /// Symbol value at radius `r = |ξ|`.
    pub fn profile(&self, r: f64) -> f64 {
        let n = self.scale;
        match self.kind {
            ProjectorKind::At => dyadic_block(n, r),
            ProjectorKind::Le => smooth_cutoff(r / n),
            ProjectorKind::Lt => {
                if n < 2.0 {
                    0.0
                } else {
                    smooth_cutoff(2.0 * r / n)
                }
            }
            ProjectorKind::Ll => smooth_cutoff(SEPARATION * r / n),
            ProjectorKind::Lesssim => smooth_cutoff(r / (SEPARATION * n)),
            ProjectorKind::Ge => smooth_cutoff_reflected(r / n),
            ProjectorKind::Gg => smooth_cutoff_reflected(r / (SEPARATION * n)),
            ProjectorKind::Gtrsim => smooth_cutoff_reflected(SEPARATION * r / n),
        }
    }

    /// Symbol values on the lattice, in storage order.
    pub fn table(&self, grid: &Grid) -> Vec<f64> {
        grid.radius_table().into_iter().map(|r| self.profile(r)).collect()
    }

    pub fn apply(&self, f: &Field) -> Field {
        f.apply_radial(|r| self.profile(r))
    }
}

/// Apply a projector given by scale and kind.
pub fn project_dyadic(f: &Field, scale: f64, kind: ProjectorKind) -> Result<Field> {
    Ok(Projector::new(scale, kind)?.apply(f))
}

/// `P_N f`.
pub fn block(f: &Field, scale: f64) -> Field {
    f.apply_radial(|r| dyadic_block(scale, r))
}

/// `M ≫ N`, i.e. `M ≥ 32N`.
#[inline]
pub fn much_greater(m: f64, n: f64) -> bool {
    m >= SEPARATION * n
}

/// `M ≳ N`, i.e. `M ≥ N/32`.
#[inline]
pub fn gtrsim(m: f64, n: f64) -> bool {
    SEPARATION * m >= n
}

/// `max_ξ |Σ_{N ≤ Nmax} φ_N(|ξ|) − 1|` over the lattice.
pub fn partition_residual(grid: &Grid) -> f64 {
    let scales = grid.dyadic_scales();
    grid.radius_table()
        .into_iter()
        .map(|r| (scales.iter().map(|&n| dyadic_block(n, r)).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `‖|∇|^s P_N f‖_{L²} / (N^s ‖P_N f‖_{L²})`.
pub fn bernstein_ratio(f: &Field, scale: f64, s: f64) -> Result<f64> {
    if !is_dyadic(scale) {
        return Err(Error::NotDyadic(scale));
    }
    let pf = block(f, scale);
    let den = pf.l2_norm();
    if den == 0.0 {
        return Err(Error::ZeroInput);
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok(pf.abs_grad(s).l2_norm() / (scale.powf(s) * den))
}

/// `Σ_{i ≥ j} 2^{−(i−j)α} a_i b_j`, with entry `i` of each sequence at scale `2^i`.
pub fn schur_bilinear_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("Schur exponent {alpha} must be positive")));
    }
    let mut total = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate().take(i + 1) {
            total += 2f64.powf(-((i - j) as f64) * alpha) * ai * bj;
        }
    }
    Ok(total)
}

/// `‖u‖_{L^p} + ‖(Σ_N (N^α |P_N u|)^q)^{1/q}‖_{L^p}`, with `q = ∞` allowed.
pub fn triebel_lizorkin_norm(f: &Field, alpha: f64, p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("Triebel-Lizorkin p = {p} outside (1, ∞)")));
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("Triebel-Lizorkin q = {q} below 1")));
    }
    let grid = f.grid();
    let mut acc = vec![0.0; grid.len()];
    for n in grid.dyadic_scales() {
        let w = n.powf(alpha);
        let samples = block(f, n).synthesize();
        for (a, s) in acc.iter_mut().zip(&samples) {
            let v = w * s.norm();
            if q.is_infinite() {
                *a = f64::max(*a, v);
            } else {
                *a += v.powf(q);
            }
        }
    }
    if q.is_finite() {
        acc.iter_mut().for_each(|a| *a = a.powf(1.0 / q));
    }
    let base = norms::lp_norm(f, p)?;
    Ok(base + norms::lebesgue_quadrature(grid, acc.into_iter(), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_field, seeded};
    use crate::C64;

    #[test]
    fn cutoff_plateau_and_support() {
        assert_eq!(smooth_cutoff(0.5), 1.0);
        assert_eq!(smooth_cutoff(3.0), 0.0);
        let v = smooth_cutoff(1.5);
        assert!(v > 0.0 && v < 1.0);
        assert!((v - 0.5).abs() < 1e-15);
        assert!((smooth_cutoff(1.3) + smooth_cutoff_reflected(1.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cutoff_monotone() {
        let mut prev = 1.0;
        for i in 0..=400 {
            let v = smooth_cutoff(1.0 + i as f64 / 400.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn annulus_margins() {
        assert_eq!(annular_cutoff(1.0, 1.0, 2.0), 1.0);
        assert_eq!(annular_cutoff(-2.0, 1.0, 2.0), 1.0);
        assert_eq!(annular_cutoff(0.75, 1.0, 2.0), 0.0);
        assert_eq!(annular_cutoff(2.25, 1.0, 2.0), 0.0);
        let v = annular_cutoff(2.1, 1.0, 2.0);
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn partition_is_exact() {
        for (d, n, l) in [(2, 16, 2.0 * std::f64::consts::PI), (3, 32, 4.0 * std::f64::consts::PI), (1, 4, 2.0 * std::f64::consts::PI)] {
            let g = Grid::new(d, n, l).unwrap();
            assert!(partition_residual(&g) <= 1e-12);
        }
    }

    #[test]
    fn top_projector_is_identity() {
        let g = Grid::unit(2, 16).unwrap();
        let f = random_field(&g, 9, None);
        let p = project_dyadic(&f, g.nmax(), ProjectorKind::Le).unwrap();
        assert_eq!(p, f);
    }

    #[test]
    fn complements_are_exact() {
        let g = Grid::unit(2, 32).unwrap();
        let f = random_field(&g, 4, None);
        let pairs = [
            (ProjectorKind::Ge, ProjectorKind::Le),
            (ProjectorKind::Gg, ProjectorKind::Lesssim),
            (ProjectorKind::Gtrsim, ProjectorKind::Ll),
        ];
        for n in [1.0, 2.0, 4.0, 8.0] {
            for (hi, lo) in pairs {
                let s = project_dyadic(&f, n, hi).unwrap().add(&project_dyadic(&f, n, lo).unwrap());
                let err = s.sub(&f).max_abs() / f.max_abs();
                assert!(err <= 1e-15, "{hi:?} + {lo:?} at N={n}: {err}");
            }
        }
    }

    #[test]
    fn single_mode_outside_block_is_annihilated() {
        let g = Grid::unit(1, 64).unwrap();
        let f = Field::single_mode(g, &[8], C64::new(1.0, 0.0)).unwrap();
        assert!(block(&f, 32.0).is_zero());
        assert!(block(&f, 2.0).is_zero());
        assert!((block(&f, 8.0).coeff_at(&[8]).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_dyadic_rejected() {
        let g = Grid::unit(1, 8).unwrap();
        assert!(matches!(project_dyadic(&Field::zeros(g), 3.0, ProjectorKind::At), Err(Error::NotDyadic(_))));
    }

    #[test]
    fn bernstein_single_mode_and_bracket() {
        let g = Grid::unit(2, 32).unwrap();
        let f = Field::single_mode(g, &[0, 4], C64::new(1.0, 0.0)).unwrap();
        assert!((bernstein_ratio(&f, 4.0, 1.3).unwrap() - 1.0).abs() < 1e-14);
        let mut rng = seeded(3);
        for _ in 0..20 {
            let h = block(&crate::random::random_field_where(&g, &mut rng, |_| true), 4.0);
            for s in [0.5, 1.0, 2.0] {
                let r = bernstein_ratio(&h, 4.0, s).unwrap();
                assert!(r >= 2f64.powf(-s) - 1e-9 && r <= 2f64.powf(s) + 1e-9);
            }
            assert_eq!(bernstein_ratio(&h, 4.0, 0.0).unwrap(), 1.0);
        }
        assert!(matches!(bernstein_ratio(&Field::zeros(g), 4.0, 1.0), Err(Error::ZeroInput)));
    }

    #[test]
    fn schur_sums() {
        let mut a = vec![0.0; 5];
        a[2] = 1.0;
        assert_eq!(schur_bilinear_sum(&a, &a, 1.0).unwrap(), 1.0);
        assert_eq!(schur_bilinear_sum(&[0.0; 4], &[0.0; 4], 1.0).unwrap(), 0.0);
        assert!(schur_bilinear_sum(&a, &a, 0.0).is_err());
        // Oracle: geometric sequences, summed in closed form over the lag.
        let seq: Vec<f64> = (0..10).map(|k| 2f64.powf(-(k as f64) / 2.0)).collect();
        let mut direct = 0.0;
        for lag in 0..10 {
            for j in 0..(10 - lag) {
                direct += 2f64.powf(-(lag as f64)) * seq[j + lag] * seq[j];
            }
        }
        assert!((schur_bilinear_sum(&seq, &seq, 1.0).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn triebel_lizorkin_single_block() {
        let g = Grid::unit(2, 32).unwrap();
        let f = Field::single_mode(g, &[8, 0], C64::new(1.0, 0.0)).unwrap();
        let base = norms::lp_norm(&f, 3.0).unwrap();
        let v = triebel_lizorkin_norm(&f, 1.5, 3.0, 2.0).unwrap();
        assert!((v - base * (1.0 + 8f64.powf(1.5))).abs() < 1e-10 * v);
        assert_eq!(triebel_lizorkin_norm(&Field::zeros(g), 1.0, 2.0, 2.0).unwrap(), 0.0);
        assert!(triebel_lizorkin_norm(&f, 1.0, 1.0, 2.0).is_err());
        assert!(triebel_lizorkin_norm(&f, 1.0, 2.0, 0.5).is_err());
    }
}
