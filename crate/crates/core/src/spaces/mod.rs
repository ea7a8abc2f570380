//! Norm and seminorm evaluators over a finite ball family and a geometric
//! time mesh.
//!
//! Ball integrals use node-indicator quadrature: a node belongs to a ball
//! when its position does. Every reported value is a maximum over the
//! sampled family, so it bounds the continuum supremum from below.

mod balls;
mod mesh;
mod norms;

pub use balls::{Ball, BallCover, BallFamily, FamilySummary};
pub use mesh::{MeshSummary, TimeMesh, TimeWeight};
pub use norms::{
    besov_norm, bmo_seminorm, campanato_seminorm, carleson_part, morrey_norm, morrey_norm_vector, q_alpha_seminorm,
    q_inverse_norm, q_inverse_norm_vector, tent_characterization, trajectory_norm, vanishing_profile, NormEstimate,
    TrajectoryNormKind,
};
pub(crate) use norms::CarlesonSum;
