//! Periodic-torus discretisation and Fourier-multiplier operators.

pub mod fft;
mod field;
mod grid;
pub mod ops;

pub use field::{ScalarField, VectorField};
pub use grid::{Freq, Grid};
pub use ops::{
    dealias, derivative, divergence, fractional_laplacian, gradient, heat_semigroup, inverse_laplacian,
    laplacian, leray_project, poisson_semigroup, riesz_transform, tent_convolution, MultiplierSymbol, TentChoice,
};
