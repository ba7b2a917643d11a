//! The rescaling `η ↦ λ²η(λ·)` keeps `‖η‖_{L^{d/2}}` and multiplies other
//! Lebesgue norms by `λ^{2−d/p}`.
//!
//! cargo run --release --example scaling

use roughwave::potentials::{rescale_potential, Potential};
use roughwave::{Field, Grid};

fn main() -> roughwave::Result<()> {
    let grid = Grid::new(2, 256, 32.0)?;
    let samples: Vec<f64> = (0..grid.len()).map(|i| (-grid.torus_distance(i).powi(2)).exp()).collect();
    let eta = Potential::from_field(Field::analyze_real(grid, &samples)?, 1.0);
    println!("lambda,p,ratio,expected");
    for lambda in [0.5, 2.0] {
        let scaled = rescale_potential(&eta, lambda)?;
        for p in [1.0, 2.0, 4.0] {
            let ratio = scaled.lp_norm(p)? / eta.lp_norm(p)?;
            println!("{lambda},{p},{ratio:?},{:?}", lambda.powf(2.0 - 2.0 / p));
        }
    }
    Ok(())
}
