//! Contraction of the cascade operator as the threshold `N₀` doubles, and
//! the per-step ratios of the critical variant.
//!
//! cargo run --release --example cascade

use roughwave::critical::critical_smallness;
use roughwave::normal_form::{cascade_contraction_ratio, cascade_step_ratios, CascadeSpec};
use roughwave::potentials::{bump_potential, power_law_potential, Band};
use roughwave::Grid;
use std::f64::consts::PI;

fn main() -> roughwave::Result<()> {
    let grid = Grid::new(2, 256, 2.0 * PI / 8.0)?;
    let eta = power_law_potential(&grid, 0.9, None)?;
    let mut prev = None;
    println!("n0,ratio,factor");
    for n0 in [16.0, 32.0, 64.0, 128.0] {
        let r = cascade_contraction_ratio(&eta, &CascadeSpec::new(n0, 4.0, 1, 2.0)?, 2, 0)?;
        let factor = prev.map_or(f64::NAN, |p: f64| r / p);
        println!("{n0},{r:?},{factor:?}");
        prev = Some(r);
    }

    let g3 = Grid::unit(3, 32)?;
    let eta3 = bump_potential(&g3, 2.0, 1.5, Band::HalfToTwo)?;
    let spec = CascadeSpec::new(16.0, 4.0, 4, 1.5)?;
    let steps = cascade_step_ratios(&eta3, &spec, 1.0, 4, 0);
    println!("critical steps {steps:.4?}, ε {:.3}", critical_smallness(&eta3, 4.0, 16.0, 1.0)?);
    Ok(())
}
