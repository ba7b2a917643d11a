//! A pseudo-spectral laboratory for the linear Schrödinger equation
//! `i∂ₜu + Δu + ηu = 0` with rough potentials `η`.
//!
//! Everything lives on a periodic torus surrogate of `Rᵈ`. Fields are stored
//! as spectral coefficients on a symmetric frequency lattice; the modules build
//! up from the transforms to the normal-form and Picard machinery and finally
//! to the norm-inflation sweeps with power-law exponent fits.
//!
//! * [`grid`]: grids, fields, transforms, Fourier symbols and products.
//! * [`lp`]: smooth cutoffs, Littlewood–Paley projectors and the Bernstein,
//!   Schur and Triebel–Lizorkin testers.
//! * [`norms`]: Sobolev, Lebesgue and space-time norms, admissible pairs and
//!   power-law fits.
//! * [`potentials`]: potential and initial-data families.
//! * [`duhamel`]: the oscillatory Duhamel kernel, time quadrature, the Picard
//!   series and the lower-bound evaluators (lattice, radial and separable).
//! * [`normal_form`]: the bilinear normal form transform, resonance terms,
//!   cascade operators and the identity residual checks.
//! * [`solver`]: Strang splitting, the dense matrix-exponential oracle and the
//!   time-derivative regularity pipeline.
//! * [`critical`]: the two-parameter smallness quantity of the critical case.
//! * [`experiments`]: sweep configuration, experiment runners and CSV/JSON output.

pub mod critical;
pub mod duhamel;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod lp;
pub mod normal_form;
pub mod norms;
pub mod potentials;
pub mod quadrature;
pub mod random;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{Field, Grid, ProductMode, TimeGrid, Trajectory};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
pub use potentials::Potential;
