//! Strang splitting against the dense oracle: error under step refinement and
//! mass drift for real and imaginary potentials.
//!
//! cargo run --release --example split_step

use roughwave::potentials::{bump_potential, Band};
use roughwave::random::random_field;
use roughwave::solver::{dense_propagator, split_step_solve, Method, SolverConfig};
use roughwave::{Grid, C64};

fn main() -> roughwave::Result<()> {
    let grid = Grid::unit(2, 16)?;
    let eta = bump_potential(&grid, 2.0, 2.0, Band::HalfToTwo)?.scaled(20.0);
    let u0 = random_field(&grid, 4, Some(3.0));
    let t = 0.2;
    let exact = dense_propagator(&eta, &grid, t)?.apply(&u0)?;
    println!("steps,error");
    for k in [20, 40, 80, 160, 320] {
        let cfg = SolverConfig::new(t / k as f64, Method::Strang)?;
        let err = split_step_solve(&eta, &u0, t, &cfg)?.last().sub(&exact).l2_norm();
        println!("{k},{err:?}");
    }
    let cfg = SolverConfig::new(0.01, Method::Strang)?;
    for (label, pot) in [("real", eta.clone()), ("imaginary", eta.with_field(eta.field().scale(C64::i())))] {
        let end = split_step_solve(&pot, &u0, 0.5, &cfg)?.last().l2_norm();
        println!("{label} potential: mass {:.6e} -> {:.6e}", u0.l2_norm(), end);
    }
    Ok(())
}
