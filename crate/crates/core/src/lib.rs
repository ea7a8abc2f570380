//! Numerical laboratory for the critical spaces `Q_α`, `Q_α^{-1}` and the
//! square Morrey space on the periodic torus, together with the Duhamel
//! machinery and Picard iteration for mild Navier–Stokes solutions.
//!
//! The continuum space `ℝⁿ` is replaced by the torus `[0, L)ⁿ`. Test data is
//! supported in the central cube of side `L/2` and ball radii never exceed
//! `L/8`, so periodic images stay negligible for the diffusion times used.

pub mod duhamel;
pub mod error;
pub mod fields;
pub mod io;
pub mod oracle;
pub mod quadrature;
pub mod solver;
pub mod spaces;
pub mod spectral;
pub mod trajectory;

pub use error::{Error, Result};
pub use spectral::{Grid, ScalarField, VectorField};
pub use trajectory::{Frame, Trajectory};
