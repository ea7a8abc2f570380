//! Time-sampled fields `g(t, ·)` on the sample times of a [`TimeMesh`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spaces::TimeMesh;
use crate::spectral::{heat_semigroup, Grid, ScalarField, VectorField};

#[derive(Clone, Debug)]
pub enum Frame {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl Frame {
    pub fn components(&self) -> &[ScalarField] {
        match self {
            Frame::Scalar(f) => std::slice::from_ref(f),
            Frame::Vector(v) => v.components(),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.components()[0].grid()
    }

    pub fn is_vector(&self) -> bool {
        matches!(self, Frame::Vector(_))
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.components().iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn as_vector(&self) -> Option<&VectorField> {
        match self {
            Frame::Vector(v) => Some(v),
            Frame::Scalar(_) => None,
        }
    }

    pub fn as_scalar(&self) -> Option<&ScalarField> {
        match self {
            Frame::Scalar(f) => Some(f),
            Frame::Vector(_) => None,
        }
    }
}

/// One frame per mesh sample; frame `k` lives at `mesh.sample(k)`, so
/// frames run from the latest time to the earliest.
#[derive(Clone, Debug)]
pub struct Trajectory {
    mesh: TimeMesh,
    frames: Vec<Frame>,
}

impl Trajectory {
    pub fn new(mesh: TimeMesh, frames: Vec<Frame>) -> Result<Self> {
        if frames.len() != mesh.len() {
            return Err(Error::InvalidArgument(format!(
                "trajectory has {} frames for {} mesh samples",
                frames.len(),
                mesh.len()
            )));
        }
        let first = &frames[0];
        for f in &frames[1..] {
            if f.is_vector() != first.is_vector() {
                return Err(Error::InvalidArgument("mixed scalar and vector frames".into()));
            }
            first.grid().check_same(f.grid())?;
        }
        Ok(Self { mesh, frames })
    }

    pub fn from_scalar_fn(mesh: &TimeMesh, f: impl Fn(f64) -> Result<ScalarField> + Sync) -> Result<Self> {
        let frames = mesh
            .samples()
            .into_par_iter()
            .map(|t| f(t).map(Frame::Scalar))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mesh.clone(), frames)
    }

    pub fn from_vector_fn(mesh: &TimeMesh, f: impl Fn(f64) -> Result<VectorField> + Sync) -> Result<Self> {
        let frames = mesh
            .samples()
            .into_par_iter()
            .map(|t| f(t).map(Frame::Vector))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mesh.clone(), frames)
    }

    /// `t ↦ e^{tΔ}f` on the mesh samples.
    pub fn heat_flow(f: &ScalarField, mesh: &TimeMesh) -> Result<Self> {
        Self::from_scalar_fn(mesh, |t| heat_semigroup(f, t))
    }

    pub fn zeros_like(&self) -> Self {
        let frames = self
            .frames
            .iter()
            .map(|f| match f {
                Frame::Scalar(s) => Frame::Scalar(ScalarField::zeros(s.grid())),
                Frame::Vector(v) => Frame::Vector(VectorField::zeros(v.grid())),
            })
            .collect();
        Self { mesh: self.mesh.clone(), frames }
    }

    pub fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    pub fn times(&self) -> Vec<f64> {
        self.mesh.samples()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, k: usize) -> &Frame {
        &self.frames[k]
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.frames[0].grid()
    }

    pub fn is_vector(&self) -> bool {
        self.frames[0].is_vector()
    }

    pub fn n_components(&self) -> usize {
        self.frames[0].components().len()
    }

    /// Component `j` as a scalar trajectory.
    pub fn component(&self, j: usize) -> Trajectory {
        let frames = self.frames.iter().map(|f| Frame::Scalar(f.components()[j].clone())).collect();
        Trajectory { mesh: self.mesh.clone(), frames }
    }

    /// Vector frames, failing for scalar trajectories.
    pub fn vector_frames(&self) -> Result<Vec<&VectorField>> {
        self.frames
            .iter()
            .map(|f| f.as_vector().ok_or_else(|| Error::InvalidArgument("expected a vector trajectory".into())))
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Trajectory) -> f64 {
        self.frames
            .iter()
            .zip(&other.frames)
            .flat_map(|(a, b)| a.components().iter().zip(b.components()).map(|(x, y)| x.max_abs_diff(y)))
            .fold(0.0, f64::max)
    }

    /// `sup_t t^{1/2} max|g(t)|` over the samples, with the maximizing time.
    pub fn sup_weighted(&self) -> (f64, f64) {
        self.mesh
            .samples()
            .iter()
            .zip(&self.frames)
            .map(|(t, f)| (t.sqrt() * f.max_abs(), *t))
            .fold((0.0, self.mesh.sample(0)), |a, b| if b.0 > a.0 { b } else { a })
    }

    /// Pointwise linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Trajectory, b: f64) -> Result<Trajectory> {
        if self.mesh != other.mesh || self.frames.len() != other.frames.len() {
            return Err(Error::InvalidArgument("trajectories on different meshes".into()));
        }
        let frames = self
            .frames
            .par_iter()
            .zip(&other.frames)
            .map(|(x, y)| combine_frames(x, a, y, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { mesh: self.mesh.clone(), frames })
    }
}

fn combine_frames(x: &Frame, a: f64, y: &Frame, b: f64) -> Result<Frame> {
    let f = |p: &ScalarField, q: &ScalarField| p.zip_with(q, |u, v| a * u + b * v);
    match (x, y) {
        (Frame::Scalar(p), Frame::Scalar(q)) => Ok(Frame::Scalar(f(p, q)?)),
        (Frame::Vector(p), Frame::Vector(q)) => Ok(Frame::Vector(p.zip_with(q, f)?)),
        _ => Err(Error::InvalidArgument("mixed scalar and vector frames".into())),
    }
}
