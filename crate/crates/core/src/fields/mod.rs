//! Deterministic test fields, the reference corpus, and the dilation and
//! translation maps used by the invariance checks.

mod generate;
mod spec;
mod transform;

pub use generate::{corpus, corpus_specs, generate, generate_scalar, generate_vector};
pub use spec::FieldSpec;
pub use transform::{dilate, scale_transform, scale_transform_traj, scale_transform_vector, translate};
