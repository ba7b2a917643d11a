use super::*;
use crate::grid::Grid;
use crate::potentials::{bump_potential, Band};
use crate::random::random_field;
use std::f64::consts::PI;

#[test]
fn free_flow_exact() {
    let g = Grid::unit(2, 16).unwrap();
    let u0 = random_field(&g, 1, Some(5.0));
    let cfg = SolverConfig::new(0.01, Method::Strang).unwrap();
    let tr = split_step_solve(&Potential::zero(g), &u0, 0.1, &cfg).unwrap();
    for (k, t) in tr.time().nodes().into_iter().enumerate() {
        assert!(tr.state(k).sub(&u0.propagate_free(t)).l2_norm() < 1e-13);
    }
}

#[test]
fn constant_potential_exact() {
    let g = Grid::unit(2, 16).unwrap();
    let c = C64::new(1.7, 0.0);
    let u0 = random_field(&g, 2, Some(5.0));
    let cfg = SolverConfig::new(0.013, Method::Strang).unwrap();
    let tr = split_step_solve(&Potential::constant(g, c), &u0, 0.2, &cfg).unwrap();
    let t = tr.time().t_final();
    let exact = u0.propagate_free(t).scale((C64::i() * c * t).exp());
    assert!(tr.last().sub(&exact).l2_norm() <= 1e-12 * u0.l2_norm());
}

#[test]
fn real_potential_conserves_mass() {
    let g = Grid::unit(2, 32).unwrap();
    let eta = bump_potential(&g, 4.0, 2.0, Band::HalfToTwo).unwrap().scaled(50.0);
    let u0 = random_field(&g, 3, None);
    let cfg = SolverConfig::new(0.01, Method::Strang).unwrap();
    let tr = split_step_solve(&eta, &u0, 0.5, &cfg).unwrap();
    let m0 = u0.l2_norm();
    for w in tr.states().windows(2) {
        assert!((w[1].l2_norm() - w[0].l2_norm()).abs() <= 1e-12 * m0);
    }
    let imag = eta.with_field(eta.field().scale(C64::i()));
    let tr = split_step_solve(&imag, &u0, 0.5, &cfg).unwrap();
    assert!((tr.last().l2_norm() - m0).abs() > 1e-3 * m0);
}

fn small_desk() -> (Grid, Potential, Field) {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let eta = bump_potential(&g, 2.0, 2.0, Band::HalfToTwo).unwrap().scaled(20.0);
    let u0 = random_field(&g, 4, Some(3.0));
    (g, eta, u0)
}

#[test]
fn dense_basics() {
    let (g, eta, _) = small_desk();
    let mode = Field::single_mode(g, &[2, -1], C64::new(1.0, 0.0)).unwrap();
    let p = dense_propagator(&Potential::zero(g), &g, 0.3).unwrap();
    assert!(p.apply(&mode).unwrap().sub(&mode.propagate_free(0.3)).l2_norm() < 1e-12);
    let id = dense_propagator(&eta, &g, 0.0).unwrap();
    let f = random_field(&g, 5, None);
    assert!(id.apply(&f).unwrap().sub(&f).l2_norm() < 1e-14 * f.l2_norm());
    let (p1, p2, p3) = (
        dense_propagator(&eta, &g, 0.11).unwrap(),
        dense_propagator(&eta, &g, 0.07).unwrap(),
        dense_propagator(&eta, &g, 0.18).unwrap(),
    );
    let lhs = p1.apply(&p2.apply(&f).unwrap()).unwrap();
    let rhs = p3.apply(&f).unwrap();
    assert!(lhs.sub(&rhs).l2_norm() <= 1e-10 * f.l2_norm());
    let big = Grid::unit(2, 128).unwrap();
    assert!(matches!(dense_propagator(&Potential::zero(big), &big, 0.1), Err(Error::DenseTooLarge(_))));
}

#[test]
fn strang_second_order_against_dense() {
    let (g, eta, u0) = small_desk();
    let t = 0.2;
    let exact = dense_propagator(&eta, &g, t).unwrap().apply(&u0).unwrap();
    let errs: Vec<f64> = [40, 80, 160]
        .iter()
        .map(|&k| {
            let cfg = SolverConfig::new(t / k as f64, Method::Strang).unwrap();
            split_step_solve(&eta, &u0, t, &cfg).unwrap().last().sub(&exact).l2_norm()
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.1, "{errs:?}");
    }
}

#[test]
fn derivative_data() {
    let g = Grid::unit(2, 16).unwrap();
    let mode = Field::single_mode(g, &[1, 2], C64::new(1.0, 0.0)).unwrap();
    let v = time_derivative_data(&Potential::zero(g), &mode).unwrap();
    assert!(v.sub(&mode.scale(C64::new(0.0, -5.0))).l2_norm() < 1e-12);
    // (u(δ) − u₀)/δ → v₀ at first order.
    let (g, eta, u0) = small_desk();
    let v0 = time_derivative_data(&eta, &u0).unwrap();
    let errs: Vec<f64> = [1e-3, 5e-4]
        .iter()
        .map(|&d| {
            let ud = dense_propagator(&eta, &g, d).unwrap().apply(&u0).unwrap();
            ud.sub(&u0).scale_real(1.0 / d).sub(&v0).l2_norm()
        })
        .collect();
    let order = (errs[0] / errs[1]).log2();
    assert!((order - 1.0).abs() < 0.1, "{errs:?}");
}

#[test]
fn reconstruct_free_case() {
    let g = Grid::unit(2, 16).unwrap();
    let u0 = random_field(&g, 6, Some(6.0));
    let zero = Potential::zero(g);
    let tg = TimeGrid::new(0.05, 5).unwrap();
    let u = dense_trajectory(&zero, &u0, &tg).unwrap();
    let v0 = time_derivative_data(&zero, &u0).unwrap();
    let v = dense_trajectory(&zero, &v0, &tg).unwrap();
    let (rec, iters) = reconstruct_with_stats(&zero, &v, &u, 4.0, 1e-12, 10).unwrap();
    assert_eq!(iters, 1);
    for (a, b) in rec.states().iter().zip(u.states()) {
        assert!(sobolev_norm(&a.sub(b), 2.0) <= 1e-10 * sobolev_norm(b, 2.0));
    }
}

#[test]
fn reconstruct_fails_without_smallness() {
    let (g, eta, u0) = small_desk();
    let strong = eta.scaled(40.0);
    assert!(contraction_factor(&strong, 1.0, 2, 0).unwrap() > 1.0);
    let tg = TimeGrid::new(0.01, 2).unwrap();
    let u = dense_trajectory(&strong, &u0, &tg).unwrap();
    let v0 = time_derivative_data_with(&strong, &u0, ProductMode::Periodic).unwrap();
    let v = dense_trajectory(&strong, &v0, &tg).unwrap();
    let r = reconstruct_from_v(&strong, &v, &u, 1.0, 1e-12, 60);
    assert!(matches!(r, Err(Error::NoConvergence { .. })));
    let _ = g;
}
