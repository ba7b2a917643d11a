use super::{Field, Grid};
use crate::error::Result;
use crate::C64;
use rayon::prelude::*;

/// How a pointwise product is formed from spectral data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProductMode {
    /// Multiply on a grid with twice the samples per axis, then truncate:
    /// the linear convolution of the two spectra, restricted to the lattice.
    #[default]
    Padded,
    /// Multiply physical samples on the grid itself: the circular convolution.
    Periodic,
}

/// Product of two fields, `(fg)^(ξ) = L⁻ᵈ Σ_{ξ₁+ξ₂=ξ} f̂(ξ₁) ĝ(ξ₂)`.
pub fn pointwise_multiply(f: &Field, g: &Field, mode: ProductMode) -> Result<Field> {
    f.grid().check_same(g.grid())?;
    Ok(match mode {
        ProductMode::Periodic => multiply_samples(f, &g.synthesize()),
        ProductMode::Padded => {
            let grid = *f.grid();
            let big = Grid::new_uncapped(grid.dim(), 2 * grid.n(), grid.period());
            let a = embed(f, &big).synthesize();
            let b = embed(g, &big).synthesize();
            let prod: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
            truncate(&Field::analyze_unchecked(big, prod), &grid)
        }
    })
}

/// Periodic product of a field with physical samples on its own grid.
pub fn multiply_samples(f: &Field, samples: &[C64]) -> Field {
    let mut u = f.synthesize();
    if u.len() >= 1 << 14 {
        u.par_iter_mut().zip(samples).for_each(|(x, y)| *x *= y);
    } else {
        u.iter_mut().zip(samples).for_each(|(x, y)| *x *= y);
    }
    Field::analyze_unchecked(*f.grid(), u)
}

/// Copy coefficients onto a finer lattice of the same torus.
fn embed(f: &Field, big: &Grid) -> Field {
    let g = f.grid();
    let mut out = vec![C64::default(); big.len()];
    for (flat, c) in f.coeffs().iter().enumerate() {
        if c.re != 0.0 || c.im != 0.0 {
            let k = g.wavenumbers(flat);
            out[big.flat_index(&k[..g.dim()]).expect("coarse lattice inside fine")] = *c;
        }
    }
    Field::from_coeffs_unchecked(*big, out)
}

/// Keep the coefficients of a fine-lattice field that lie on `grid`.
fn truncate(f: &Field, grid: &Grid) -> Field {
    let big = f.grid();
    let coeffs = (0..grid.len())
        .map(|flat| {
            let k = grid.wavenumbers(flat);
            f.coeffs()[big.flat_index(&k[..grid.dim()]).unwrap()]
        })
        .collect();
    Field::from_coeffs_unchecked(*grid, coeffs)
}
