//! Picard iteration for the mild Navier–Stokes formulation
//! `u = e^{tΔ}a − B(u, u)` with norm diagnostics, an independent
//! time-stepping cross-check, and the divergence representation of
//! `Q_α^{-1}` data.

mod divrep;
mod picard;
mod stepper;

pub use divrep::{div_components, div_representation, DivRepresentation};
pub use picard::{
    calibrate_smallness, heat_flow_initial, mild_residual, picard_solve, IterationDiagnostics, SolverConfig,
};
pub use stepper::{cross_check_against, cross_check_timestepper, integrate_navier_stokes};
