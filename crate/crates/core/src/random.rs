//! Seeded random spectral fields.

use crate::grid::{Field, Grid};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex coefficient with real and imaginary parts uniform on `[-1, 1]`.
pub fn unit_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// Random coefficients wherever `keep(ξ)` holds, zero elsewhere.
pub fn random_field_where(grid: &Grid, rng: &mut impl Rng, mut keep: impl FnMut(&[f64]) -> bool) -> Field {
    Field::from_spectral_fn(*grid, |xi| if keep(xi) { unit_complex(rng) } else { C64::default() })
}

/// Random field, optionally band-limited to `|ξ|_∞ ≤ band`.
pub fn random_field(grid: &Grid, seed: u64, band: Option<f64>) -> Field {
    let mut rng = seeded(seed);
    let b = band.unwrap_or(f64::INFINITY);
    random_field_where(grid, &mut rng, |xi| xi.iter().all(|x| x.abs() <= b))
}

/// Random field supported in the shell `lo ≤ |ξ| ≤ hi`.
pub fn random_shell_field(grid: &Grid, rng: &mut impl Rng, lo: f64, hi: f64) -> Field {
    random_field_where(grid, rng, |xi| {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        r >= lo && r <= hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let g = Grid::unit(2, 8).unwrap();
        assert_eq!(random_field(&g, 5, None), random_field(&g, 5, None));
        assert_ne!(random_field(&g, 5, None), random_field(&g, 6, None));
    }

    #[test]
    fn band_is_respected() {
        let g = Grid::unit(2, 16).unwrap();
        let f = random_field(&g, 1, Some(2.0));
        for i in f.support() {
            let k = g.wavenumbers(i);
            assert!(k[0].abs() <= 2 && k[1].abs() <= 2);
        }
    }
}
