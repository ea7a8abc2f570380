use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use std::sync::OnceLock;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Real scalar field sampled on grid nodes.
///
/// The spectrum is materialised lazily and cached; fields are immutable
/// after construction so the cache never goes stale.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl ScalarField {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values, spectrum: OnceLock::new() })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> f64 + Sync) -> Self {
        let values = (0..grid.len()).into_par_iter().map(|i| f(grid.node(i))).collect();
        Self { grid: grid.clone(), values, spectrum: OnceLock::new() }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()], spectrum: OnceLock::new() }
    }

    /// Builds the real field whose DFT is the Hermitian part of `spectrum`.
    ///
    /// Imaginary parts produced by a non-Hermitian input are discarded, and
    /// the cached spectrum is symmetrised to match.
    pub fn from_spectrum(grid: &Grid, spectrum: Vec<Complex64>) -> Self {
        assert_eq!(spectrum.len(), grid.len());
        let values: Vec<f64> = fft::inverse(grid, &spectrum).into_iter().map(|c| c.re).collect();
        let sym: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|i| 0.5 * (spectrum[i] + spectrum[grid.conjugate_index(i)].conj()))
            .collect();
        let cell = OnceLock::new();
        let _ = cell.set(sym);
        Self { grid: grid.clone(), values, spectrum: cell }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Unnormalised DFT coefficients.
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| fft::forward_real(&self.grid, &self.values))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Oscillation `max f - min f`.
    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    /// Torus `L²` norm with uniform node weights.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Self {
        let values = self.values.par_iter().map(|&v| f(v)).collect();
        Self { grid: self.grid.clone(), values, spectrum: OnceLock::new() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.par_iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), values, spectrum: OnceLock::new() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    /// Same samples re-interpreted on a box of a different length.
    pub fn on_box(&self, box_length: f64) -> Result<Self> {
        let grid = self.grid.with_box_length(box_length)?;
        Ok(Self { grid, values: self.values.clone(), spectrum: OnceLock::new() })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Vector field with `n_dims` components on a common grid.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<ScalarField>,
    divergence_free: bool,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("vector field needs components".into()))?;
        if components.len() != first.grid().n_dims() {
            return Err(Error::InvalidArgument(format!(
                "expected {} components, got {}",
                first.grid().n_dims(),
                components.len()
            )));
        }
        for c in &components[1..] {
            first.grid().check_same(c.grid())?;
        }
        Ok(Self { components, divergence_free: false })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            components: (0..grid.n_dims()).map(|_| ScalarField::zeros(grid)).collect(),
            divergence_free: true,
        }
    }

    pub(crate) fn with_tag(mut self, divergence_free: bool) -> Self {
        self.divergence_free = divergence_free;
        self
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &ScalarField {
        &self.components[j]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    pub fn is_divergence_free_tagged(&self) -> bool {
        self.divergence_free
    }

    /// `max_k |k·û(k)| / max_k |û(k)|`, zero for the zero field.
    pub fn divergence_defect(&self) -> f64 {
        let grid = self.grid();
        let spectra: Vec<&[Complex64]> = self.components.iter().map(|c| c.spectrum()).collect();
        let (num, den) = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let f = grid.freq(i);
                let mut dot = Complex64::default();
                let mut mag = 0.0f64;
                for (j, s) in spectra.iter().enumerate() {
                    dot += s[i] * f.k[j] as f64;
                    mag = mag.max(s[i].norm());
                }
                (dot.norm(), mag)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.components.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>) -> Result<Self> {
        if self.components.len() != other.components.len() {
            return Err(Error::GridMismatch("component count".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components, divergence_free: self.divergence_free && other.divergence_free })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            components: self.components.iter().map(|f| f.scaled(c)).collect(),
            divergence_free: self.divergence_free,
        }
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { components: self.components.iter().map(f).collect(), divergence_free: self.divergence_free }
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}
