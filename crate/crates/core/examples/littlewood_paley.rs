//! Dyadic blocks of a random field: partition exactness, block energies and
//! Bernstein ratios.
//!
//! cargo run --release --example littlewood_paley

use roughwave::lp::{bernstein_ratio, block, partition_residual};
use roughwave::random::random_field;
use roughwave::Grid;

fn main() -> roughwave::Result<()> {
    let grid = Grid::unit(2, 64)?;
    println!("partition residual {:.2e}", partition_residual(&grid));
    let f = random_field(&grid, 3, None);
    let mut total = roughwave::Field::zeros(grid);
    println!("N,block_l2,bernstein_s1");
    for n in grid.dyadic_scales() {
        let b = block(&f, n);
        total = total.add(&b);
        let ratio = if b.is_zero() || n < 2.0 { f64::NAN } else { bernstein_ratio(&b, n, 1.0)? };
        println!("{n},{:?},{ratio:?}", b.l2_norm());
    }
    println!("sum of blocks vs field {:.2e}", total.sub(&f).l2_norm() / f.l2_norm());
    Ok(())
}
