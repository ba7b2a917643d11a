//! Strichartz ratios `‖e^{itΔ}f‖_{L^q_t L^p_x} / ‖f‖_{L²}` for random band
//! data and a few admissible pairs.
//!
//! cargo run --release --example strichartz_ratios

use roughwave::experiments::strichartz_ratio;
use roughwave::random::{random_shell_field, seeded};
use roughwave::Grid;

fn main() -> roughwave::Result<()> {
    let grid = Grid::unit(2, 16)?;
    let mut rng = seeded(0);
    println!("q,p,band,ratio");
    for (q, p) in [(f64::INFINITY, 2.0), (4.0, 4.0), (3.0, 6.0)] {
        for band in [1.0, 2.0, 4.0] {
            let f = random_shell_field(&grid, &mut rng, band, 2.0 * band);
            let r = strichartz_ratio(&f, q, p, 0.25, 32)?;
            println!("{q},{p},{band},{r:?}");
        }
    }
    match strichartz_ratio(&random_shell_field(&grid, &mut rng, 1.0, 2.0), 2.0, f64::INFINITY, 0.25, 32) {
        Ok(_) => println!("endpoint accepted"),
        Err(e) => println!("endpoint (2,∞) in d=2: {e}"),
    }
    Ok(())
}
