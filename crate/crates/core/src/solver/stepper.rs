//! Integrating-factor RK4 in Fourier space: the heat factor is applied
//! exactly and the dealiased, projected nonlinearity explicitly. Steps land
//! on the mesh samples, each interval split into `substeps` equal steps.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::picard::{check_div_free, picard_solve, SolverConfig, RESIDUAL_FLOOR};
use crate::duhamel::projected_flux;
use crate::error::{invalid, Error, Result};
use crate::spaces::TimeMesh;
use crate::spectral::{Grid, ScalarField, VectorField};
use crate::trajectory::{Frame, Trajectory};

type Spectra = Vec<Vec<Complex64>>;

fn to_field(grid: &Grid, s: &Spectra) -> Result<VectorField> {
    let comps = s.iter().map(|c| ScalarField::from_spectrum(grid, c.clone())).collect();
    Ok(VectorField::new(comps)?.with_tag(true))
}

/// `−P∇·(u⊗u)` in Fourier space.
fn nonlinear(grid: &Grid, s: &Spectra) -> Result<Spectra> {
    let u = to_field(grid, s)?;
    Ok(projected_flux(&u, &u)?.components().iter().map(|c| c.spectrum().iter().map(|z| -z).collect()).collect())
}

/// `Σ_m c_m E_m ⊙ x_m` with `E_m` a per-mode factor (`None` = identity).
fn lincomb(terms: &[(f64, Option<&[f64]>, &Spectra)]) -> Spectra {
    let n = terms[0].2.len();
    let len = terms[0].2[0].len();
    (0..n)
        .map(|j| {
            (0..len)
                .into_par_iter()
                .map(|i| {
                    terms.iter().fold(Complex64::default(), |acc, (c, e, x)| {
                        let f = e.map_or(1.0, |e| e[i]);
                        acc + x[j][i] * (c * f)
                    })
                })
                .collect()
        })
        .collect()
}

fn rk4_step(grid: &Grid, lam: &[f64], u: &Spectra, h: f64) -> Result<Spectra> {
    let e1: Vec<f64> = lam.iter().map(|l| (-h * l).exp()).collect();
    let eh: Vec<f64> = lam.iter().map(|l| (-0.5 * h * l).exp()).collect();
    let (e1, eh) = (Some(e1.as_slice()), Some(eh.as_slice()));
    let k1 = nonlinear(grid, u)?;
    let ua = lincomb(&[(1.0, eh, u), (0.5 * h, eh, &k1)]);
    let k2 = nonlinear(grid, &ua)?;
    let ub = lincomb(&[(1.0, eh, u), (0.5 * h, None, &k2)]);
    let k3 = nonlinear(grid, &ub)?;
    let uc = lincomb(&[(1.0, e1, u), (h, eh, &k3)]);
    let k4 = nonlinear(grid, &uc)?;
    Ok(lincomb(&[
        (1.0, e1, u),
        (h / 6.0, e1, &k1),
        (h / 3.0, eh, &k2),
        (h / 3.0, eh, &k3),
        (h / 6.0, None, &k4),
    ]))
}

/// Integrates `∂_t u = Δu − P∇·(u⊗u)` from `a` and records `u` at the mesh
/// samples.
pub fn integrate_navier_stokes(a: &VectorField, mesh: &TimeMesh, substeps: usize) -> Result<Trajectory> {
    check_div_free(a)?;
    if substeps == 0 {
        return invalid("substeps must be positive");
    }
    let grid = a.grid();
    let lam: Vec<f64> = (0..grid.len()).map(|i| grid.freq(i).xi2).collect();
    let scale = a.max_abs();
    let mut u: Spectra = a.components().iter().map(|c| c.spectrum().to_vec()).collect();
    let mut frames = vec![None; mesh.len()];
    let mut t = 0.0;
    for k in (0..mesh.len()).rev() {
        let target = mesh.sample(k);
        let h = (target - t) / substeps as f64;
        for _ in 0..substeps {
            u = rk4_step(grid, &lam, &u, h)?;
        }
        t = target;
        let field = to_field(grid, &u)?;
        let m = field.max_abs();
        if !m.is_finite() || m > 1e3 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Unstable(format!("max|u| = {m:e} at t = {t:e}; reduce the step")));
        }
        frames[k] = Some(Frame::Vector(field));
    }
    Trajectory::new(mesh.clone(), frames.into_iter().map(|f| f.expect("all samples visited")).collect())
}

/// `max_t ‖u(t) − u_step(t)‖₂ / ‖u_step(t)‖₂` against the stepper on the
/// mesh of `u`.
pub fn cross_check_against(u: &Trajectory, a: &VectorField, substeps: usize) -> Result<f64> {
    let step = integrate_navier_stokes(a, u.mesh(), substeps)?;
    let mut worst: f64 = 0.0;
    for (x, y) in u.frames().iter().zip(step.frames()) {
        let (Frame::Vector(x), Frame::Vector(y)) = (x, y) else {
            return invalid("vector trajectory expected");
        };
        let d = x.sub(y)?.l2_norm();
        worst = worst.max(if d == 0.0 { 0.0 } else { d / y.l2_norm().max(RESIDUAL_FLOOR) });
    }
    Ok(worst)
}

/// Runs the Picard solve and the stepper on the configured mesh and
/// returns their largest relative discrepancy.
pub fn cross_check_timestepper(a: &VectorField, config: &SolverConfig) -> Result<f64> {
    config.validate()?;
    config.check_grid(a.grid())?;
    let (u, _) = picard_solve(a, config)?;
    cross_check_against(&u, a, config.substeps)
}
