use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::rule::{integrate_all, integrate_at, TimeRule};
use crate::error::{invalid, Error, Result};
use crate::spaces::{BallFamily, CarlesonSum, TimeWeight};
use crate::spectral::{Grid, ScalarField};
use crate::trajectory::{Frame, Trajectory};

fn scalar_spectra(f: &Trajectory) -> Result<Vec<Vec<Complex64>>> {
    f.frames()
        .iter()
        .map(|fr| match fr {
            Frame::Scalar(s) => Ok(s.spectrum().to_vec()),
            Frame::Vector(_) => invalid("scalar trajectory expected"),
        })
        .collect()
}

fn laplacian_symbol(grid: &Grid) -> Vec<f64> {
    (0..grid.len()).into_par_iter().map(|i| grid.freq(i).xi2).collect()
}

/// `‖g‖²_{L²}` from the unnormalised spectrum, optionally weighted per mode.
fn spectral_l2_sq(grid: &Grid, spec: &[Complex64], weight: impl Fn(usize) -> f64 + Sync) -> f64 {
    let s: f64 = spec.iter().enumerate().map(|(i, c)| weight(i) * c.norm_sqr()).sum();
    s * grid.cell_volume() / grid.len() as f64
}

fn minus_laplacian_applied(spectra: Vec<Vec<Complex64>>, lam: &[f64]) -> Vec<Vec<Complex64>> {
    spectra
        .into_iter()
        .map(|s| s.into_iter().zip(lam).map(|(c, &l)| -l * c).collect())
        .collect()
}

/// `I(f,t) = ∫_0^t e^{(t-s)Δ} Δf(s) ds` for a scalar trajectory.
pub fn duhamel_laplacian(f: &Trajectory, t: f64, rule: TimeRule) -> Result<ScalarField> {
    if !(t > 0.0 && t <= f.mesh().t_cap()) {
        return invalid(format!("t = {t} outside the trajectory horizon"));
    }
    let grid = f.grid().clone();
    let lam = laplacian_symbol(&grid);
    let spectra = minus_laplacian_applied(scalar_spectra(f)?, &lam);
    Ok(ScalarField::from_spectrum(&grid, integrate_at(f.mesh(), rule, &lam, &spectra, t)))
}

/// `I(f, ·)` at every mesh sample.
pub fn duhamel_laplacian_trajectory(f: &Trajectory, rule: TimeRule) -> Result<Trajectory> {
    let grid = f.grid().clone();
    let lam = laplacian_symbol(&grid);
    let spectra = minus_laplacian_applied(scalar_spectra(f)?, &lam);
    let frames = integrate_all(f.mesh(), rule, &lam, &spectra)
        .into_iter()
        .map(|s| Frame::Scalar(ScalarField::from_spectrum(&grid, s)))
        .collect();
    Trajectory::new(f.mesh().clone(), frames)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lemma23 {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lemma24 {
    pub lhs: f64,
    pub j: f64,
    pub l1_part: f64,
    pub ratio: f64,
}

const DEGENERATE: f64 = 1e-300;

/// `∫_0^T ‖I(f,t)‖² t^{-α} dt` against `∫_0^T ‖f(t)‖² t^{-α} dt`.
///
/// The trajectory is read as constant on each mesh cell; cells above `T`
/// are left out of both integrals.
pub fn lemma23_check(f: &Trajectory, alpha: f64, t_max: f64) -> Result<Lemma23> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("alpha must lie in [0,1), got {alpha}"));
    }
    let mesh = f.mesh();
    let grid = f.grid().clone();
    let lam = laplacian_symbol(&grid);
    let raw = scalar_spectra(f)?;
    let spectra = minus_laplacian_applied(raw.clone(), &lam);
    let out = integrate_all(mesh, TimeRule::CellConstant, &lam, &spectra);
    let w = mesh.weights(TimeWeight::Carleson, alpha);
    let first = mesh.first_cell_below(t_max);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for k in first..mesh.len() {
        lhs += w[k] * spectral_l2_sq(&grid, &out[k], |_| 1.0);
        rhs += w[k] * spectral_l2_sq(&grid, &raw[k], |_| 1.0);
    }
    ratio_or_zero(lhs, rhs).map(|ratio| Lemma23 { lhs, rhs, ratio })
}

fn ratio_or_zero(num: f64, den: f64) -> Result<f64> {
    if den > DEGENERATE {
        Ok(num / den)
    } else if num > DEGENERATE {
        Err(Error::Inconsistent(format!("numerator {num:e} with vanishing denominator")))
    } else {
        Ok(0.0)
    }
}

/// `∫_0^1 ‖√-Δ e^{tΔ} ∫_0^t f(s) ds‖² t^{-α} dt` against `J(f;α)` times
/// `∫_0^1 ‖f(t)‖₁ t^{-α} dt`. The trajectory must live on `(0, 1]`.
pub fn lemma24_check(f: &Trajectory, alpha: f64, family: &BallFamily) -> Result<Lemma24> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("alpha must lie in [0,1), got {alpha}"));
    }
    let mesh = f.mesh();
    if (mesh.t_cap() - 1.0).abs() > 1e-12 {
        return invalid(format!("horizon must be normalised to 1, got {}", mesh.t_cap()));
    }
    let grid = f.grid().clone();
    let lam = laplacian_symbol(&grid);
    let raw = scalar_spectra(f)?;
    let zero = vec![0.0; grid.len()];
    let primitive = integrate_all(mesh, TimeRule::CellConstant, &zero, &raw);
    let w = mesh.weights(TimeWeight::Carleson, alpha);
    let samples = mesh.samples();
    let mut lhs = 0.0;
    let mut l1 = 0.0;
    for k in 0..mesh.len() {
        let s = samples[k];
        lhs += w[k] * spectral_l2_sq(&grid, &primitive[k], |i| lam[i] * (-2.0 * s * lam[i]).exp());
        let Frame::Scalar(fk) = f.frame(k) else { unreachable!() };
        l1 += w[k] * fk.l1_norm();
    }
    let horizon = |r: f64| r * r;
    let sum = CarlesonSum {
        mesh,
        weights: w,
        horizon: &horizon,
        radius_power: 2.0 * alpha - grid.n_dims() as f64,
        root: false,
    };
    let cover = family.cover(&grid);
    let (j, _) = sum.evaluate(&grid, family, &cover, |k| {
        let Frame::Scalar(fk) = f.frame(k) else { unreachable!() };
        Ok(fk.values().iter().map(|v| v.abs()).collect())
    })?;
    let ratio = ratio_or_zero(lhs, j * l1)?;
    Ok(Lemma24 { lhs, j, l1_part: l1, ratio })
}
