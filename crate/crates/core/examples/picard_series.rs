//! Picard series for `v = ∂ₜu` on a small torus, compared term by term with
//! the dense matrix-exponential flow.
//!
//! cargo run --release --example picard_series

use roughwave::duhamel::picard_series;
use roughwave::potentials::{bump_potential, Band};
use roughwave::random::random_field;
use roughwave::solver::dense_propagator;
use roughwave::{Grid, TimeGrid};

fn main() -> roughwave::Result<()> {
    let grid = Grid::unit(2, 16)?;
    let eta = bump_potential(&grid, 2.0, 2.0, Band::HalfToTwo)?;
    let v0 = random_field(&grid, 0, Some(4.0));
    let v0 = v0.scale_real(1.0 / v0.l2_norm());
    let t = 1.0 / 64.0;
    let tg = TimeGrid::new(t, 256)?;
    let series = picard_series(&eta, &v0, &tg, 8, 0.0)?;
    let oracle = dense_propagator(&eta, &grid, t)?.apply(&v0)?;
    println!("n,term_norm");
    for (n, norm) in series.final_norms.iter().enumerate() {
        println!("{n},{norm:?}");
    }
    println!("ratio {:.4}", series.ratio());
    println!("partial sum vs dense flow {:.3e}", series.partial_sum.last().sub(&oracle).l2_norm());
    Ok(())
}
