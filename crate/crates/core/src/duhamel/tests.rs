use super::*;
use crate::grid::Grid;
use crate::potentials::{bump_potential, shell_data, Band};
use crate::random::random_field;
use std::f64::consts::PI;

#[test]
fn kernel_stable_form() {
    assert_eq!(duhamel_kernel(0.7, 0.0), C64::new(0.7, 0.0));
    for &t in &[1e-3, 0.3, 2.0] {
        for e in -8..=1 {
            for &sgn in &[1.0, -1.0] {
                let x = sgn * 10f64.powi(e);
                let phi = x / t;
                let k = duhamel_kernel(t, phi);
                let oracle = if x.abs() >= 1e-2 {
                    (C64::from_polar(1.0, x) - 1.0) / (C64::i() * phi)
                } else {
                    let z = C64::new(0.0, x);
                    (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z * z * z * z / 120.0) * t
                };
                assert!((k - oracle).norm() <= 1e-13 * t, "{t} {x}");
                assert!(k.norm() <= t.min(2.0 / phi.abs()) * (1.0 + 1e-14));
            }
        }
    }
    assert!((duhamel_kernel_re(0.4, 3.0) - (1.2f64).sin() / 3.0).abs() < 1e-15);
}

fn desk() -> (Grid, Potential, Field) {
    let g = Grid::new(2, 32, 4.0 * PI).unwrap();
    let eta = bump_potential(&g, 2.0, 2.0, Band::HalfToTwo).unwrap();
    let u0 = shell_data(&g, 1.0, 0.0).unwrap();
    (g, eta, u0)
}

#[test]
fn trivial_kernel_cases() {
    let (g, eta, u0) = desk();
    assert!(duhamel_kernel_apply(&eta, &u0, 0.0).unwrap().is_zero());
    assert!(duhamel_kernel_apply(&Potential::zero(g), &u0, 0.3).unwrap().is_zero());
}

#[test]
fn kernel_matches_refined_quadrature() {
    let (_, eta, u0) = desk();
    let t = 0.05;
    let exact = duhamel_kernel_apply(&eta, &u0, t).unwrap();
    let tg = TimeGrid::new(t, 1024).unwrap();
    let q = duhamel_quadrature(&eta, &Trajectory::constant(tg, &u0), &tg).unwrap();
    let err = q.last().sub(&exact).l2_norm() / exact.l2_norm();
    assert!(err < 1e-6, "{err}");
}

#[test]
fn quadrature_second_order() {
    let (_, eta, u0) = desk();
    let t = 0.2;
    let exact = duhamel_kernel_apply(&eta, &u0, t).unwrap();
    let errs: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&k| {
            let tg = TimeGrid::new(t, k).unwrap();
            let q = duhamel_quadrature(&eta, &Trajectory::constant(tg, &u0), &tg).unwrap();
            q.last().sub(&exact).l2_norm()
        })
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }
}

#[test]
fn constant_potential_closed_form() {
    // η ≡ c: the integrand is c·f, so the quadrature is exact for a constant source.
    let g = Grid::unit(2, 16).unwrap();
    let c = C64::new(0.7, 0.0);
    let eta = Potential::constant(g, c);
    let f = random_field(&g, 3, Some(3.0));
    let tg = TimeGrid::new(0.4, 10).unwrap();
    let q = duhamel_quadrature(&eta, &Trajectory::constant(tg, &f), &tg).unwrap();
    for (k, t) in tg.nodes().into_iter().enumerate() {
        let expect = f.scale(c * t);
        assert!(q.state(k).sub(&expect).l2_norm() < 1e-12 * f.l2_norm());
    }
    let zero = duhamel_quadrature(&eta, &Trajectory::zeros(tg, g), &tg).unwrap();
    assert!(zero.states().iter().all(|s| s.is_zero()));
}

#[test]
fn picard_free_case() {
    let g = Grid::unit(2, 16).unwrap();
    let v0 = random_field(&g, 1, Some(4.0));
    let tg = TimeGrid::new(0.1, 8).unwrap();
    let p = picard_series(&Potential::zero(g), &v0, &tg, 3, 0.0).unwrap();
    assert!(p.terms[1..].iter().all(|tr| tr.states().iter().all(|s| s.is_zero())));
    for (k, t) in tg.nodes().into_iter().enumerate() {
        assert!(p.partial_sum.state(k).sub(&v0.propagate_free(t)).l2_norm() < 1e-14);
    }
    assert_eq!(p.ratio(), 0.0);
    assert!(p.terms[1].state(0).is_zero());
}

#[test]
fn picard_derivative_consistency() {
    // Forward difference of I₁ at node k approximates i e^{−itΔ}(η e^{itΔ} v₀).
    let (_, eta, v0) = desk();
    let tg = TimeGrid::new(0.05, 400).unwrap();
    let p = picard_series(&eta, &v0, &tg, 1, 0.0).unwrap();
    let k = 200;
    let h = tg.step();
    let diff = p.terms[1].state(k + 1).sub(p.terms[1].state(k)).scale_real(1.0 / h);
    let mid = interaction_integrand(&eta, &v0, tg.node(k) + h / 2.0).scale(C64::i());
    assert!(diff.sub(&mid).l2_norm() < 1e-4 * mid.l2_norm());
}

#[test]
fn overflow_detected() {
    let g = Grid::unit(1, 16).unwrap();
    let eta = Potential::from_field(Field::single_mode(g, &[6], C64::new(1.0, 0.0)).unwrap(), 2.0);
    let u0 = Field::single_mode(g, &[5], C64::new(1.0, 0.0)).unwrap();
    assert!(matches!(duhamel_kernel_apply(&eta, &u0, 0.1), Err(Error::SupportOverflow(_))));
    assert!(duhamel_kernel_apply_with(&eta, &u0, 0.1, ProductMode::Periodic).is_ok());
}

#[test]
fn regions_and_phase() {
    let m = 64.0;
    let t = 1.0 / (m * m);
    let omega = Region::positivity_shell(m);
    let data = Region::Shell { inner: 0.75, outer: 2.25 };
    assert!(phase_min_check(&omega, &data, t).unwrap() >= 0.25);
    assert_eq!(phase_min_check(&omega, &data, 0.0).unwrap(), 0.0);
    let close = Region::Shell { inner: 7.75, outer: 64.25 };
    let poor = phase_min_check(&Region::positivity_shell(64.0), &close, t).unwrap();
    assert!(poor < 0.25);
    assert!(phase_min_check(&Region::Shell { inner: 2.0, outer: 1.0 }, &data, t).is_err());
    assert_eq!(sin_min_on(0.0, 5.0), -1.0);
    assert!((sin_min_on(0.5, 1.0) - 0.5f64.sin()).abs() < 1e-15);
}

#[test]
fn shell_phase_on_lattice() {
    // For ξ in the positivity shell and t = M⁻², t|ξ|² ∈ [π/3, π/2].
    let g = Grid::unit(2, 64).unwrap();
    let m = 16.0;
    let t = 1.0 / (m * m);
    for i in Region::positivity_shell(m).lattice_points(&g) {
        let s = (t * g.freq_sq(i)).sin();
        assert!(s >= 0.5 * (3f64).sqrt() - 1e-12);
    }
}

#[test]
fn lower_bound_basics() {
    let (g, eta, u0) = desk();
    let omega = Region::Shell { inner: 2.0, outer: 4.0 };
    let zero = realpart_lower_bound(&eta, &u0, 0.0, &omega, 1.0).unwrap();
    assert_eq!(zero.min_re, 0.0);
    assert_eq!(zero.norm_on_omega, 0.0);
    let lb = realpart_lower_bound(&eta, &u0, 0.2, &omega, 1.0).unwrap();
    let full = sobolev_norm(&duhamel_kernel_apply(&eta, &u0, 0.2).unwrap(), 1.0);
    assert!(lb.norm_on_omega <= full);
    let empty = Region::Shell { inner: 100.0, outer: 101.0 };
    assert!(matches!(realpart_lower_bound(&eta, &u0, 0.2, &empty, 1.0), Err(Error::EmptyRegion(_))));
    let _ = g;
}
