//! Singular time-integral operators: the heat–Laplacian Duhamel integral,
//! the bilinear operator of the mild formulation, and the kernel checks
//! behind their bounds.
//!
//! Time integrals are evaluated by exponential product integration: the
//! heat factor `e^{-(t-s)|ξ|²}` is integrated exactly per mode against a
//! piecewise polynomial reconstruction of the integrand from the mesh
//! samples, so the `s → t` layer needs no extra grading.

mod bilinear;
mod lemmas;
pub(crate) mod rule;
mod schur;

pub use crate::trajectory::{Frame, Trajectory};
pub use bilinear::{
    advection_term, bilinear_b, bilinear_bounds_check, bilinear_trajectory, pressure_from_velocity, projected_flux,
    BilinearRatios,
};
pub use lemmas::{duhamel_laplacian, duhamel_laplacian_trajectory, lemma23_check, lemma24_check, Lemma23, Lemma24};
pub use rule::TimeRule;
pub use schur::{schur_column_mass, schur_kernel_integrals, schur_row_mass, SchurEntry, SchurTable};
