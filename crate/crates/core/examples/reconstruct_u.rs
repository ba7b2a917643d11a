//! Recover `u` from `v = ∂ₜu` by the high-frequency fixed point and compare
//! with the exact flow.
//!
//! cargo run --release --example reconstruct_u

use roughwave::norms::sobolev_norm;
use roughwave::potentials::{bump_potential, Band};
use roughwave::random::random_field;
use roughwave::solver::{contraction_factor, dense_trajectory, reconstruct_with_stats, time_derivative_data_with};
use roughwave::{Grid, ProductMode, TimeGrid};

fn main() -> roughwave::Result<()> {
    let grid = Grid::unit(2, 16)?;
    let eta = bump_potential(&grid, 2.0, 2.0, Band::HalfToTwo)?.scaled(4.0);
    let u0 = random_field(&grid, 1, Some(5.0));
    let tg = TimeGrid::new(0.05, 5)?;
    let u = dense_trajectory(&eta, &u0, &tg)?;
    let v0 = time_derivative_data_with(&eta, &u0, ProductMode::Periodic)?;
    let v = dense_trajectory(&eta, &v0, &tg)?;
    for n0 in [2.0, 4.0, 8.0] {
        let q = contraction_factor(&eta, n0, 2, 0)?;
        match reconstruct_with_stats(&eta, &v, &u, n0, 1e-12, 100) {
            Ok((rec, iters)) => {
                let err = sobolev_norm(&rec.last().sub(u.last()), 2.0) / sobolev_norm(u.last(), 2.0);
                println!("N0 {n0}: factor {q:.3}, {iters} iterations, relative H² error {err:.2e}");
            }
            Err(e) => println!("N0 {n0}: factor {q:.3}, {e}"),
        }
    }
    Ok(())
}
