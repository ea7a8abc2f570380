use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::rule::{integrate_all, integrate_at, TimeRule};
use crate::error::{invalid, Error, Result};
use crate::spaces::{carleson_part, trajectory_norm, BallFamily, TrajectoryNormKind};
use crate::spectral::fft;
use crate::spectral::ops::{keeps_mode, project_mode};
use crate::spectral::{dealias, Grid, ScalarField, VectorField};
use crate::trajectory::{Frame, Trajectory};

/// Physical values of the 2/3-truncated components.
fn dealiased_values(u: &VectorField) -> Vec<Vec<f64>> {
    u.components().par_iter().map(|c| dealias(c).into_values()).collect()
}

/// Spectra of `ŵ_{kj}` for the dealiased products `u_k v_j`.
fn product_spectra(grid: &Grid, u: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<Vec<Vec<Complex64>>> {
    let n = u.len();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let w: Vec<f64> = u[k].iter().zip(&v[j]).map(|(a, b)| a * b).collect();
                    fft::forward_real(grid, &w)
                })
                .collect()
        })
        .collect()
}

/// Spectra of `∇·(u⊗v)`, i.e. `Σ_k ∂_k(u_k v_j)`, truncated by the 2/3
/// rule; Leray-projected when `project` is set.
fn flux_spectra(u: &VectorField, v: &VectorField, project: bool) -> Result<Vec<Vec<Complex64>>> {
    let grid = u.grid();
    grid.check_same(v.grid())?;
    let n = grid.n_dims();
    let w = product_spectra(grid, &dealiased_values(u), &dealiased_values(v));
    let rows: Vec<[Complex64; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut q = [Complex64::default(); 3];
            if !keeps_mode(grid, i) {
                return q;
            }
            let f = grid.freq(i);
            for (j, qj) in q.iter_mut().enumerate().take(n) {
                for (k, wk) in w.iter().enumerate() {
                    *qj += wk[j][i] * Complex64::new(0.0, f.xi[k]);
                }
            }
            if project {
                project_mode(&f, &mut q, n);
            }
            q
        })
        .collect();
    Ok((0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect())
}

/// Dealiased advection term `u·∇u = ∇·(u⊗u)` (for divergence-free `u`).
pub fn advection_term(u: &VectorField) -> Result<VectorField> {
    let grid = u.grid();
    let comps = flux_spectra(u, u, false)?.into_iter().map(|s| ScalarField::from_spectrum(grid, s)).collect();
    VectorField::new(comps)
}

/// `P∇·(u⊗v)` with dealiased product.
pub fn projected_flux(u: &VectorField, v: &VectorField) -> Result<VectorField> {
    let grid = u.grid();
    let comps = flux_spectra(u, v, true)?.into_iter().map(|s| ScalarField::from_spectrum(grid, s)).collect();
    Ok(VectorField::new(comps)?.with_tag(true))
}

fn decay_rates(grid: &Grid) -> Vec<f64> {
    (0..grid.len()).into_par_iter().map(|i| grid.freq(i).xi2).collect()
}

fn check_pair(u: &Trajectory, v: &Trajectory) -> Result<()> {
    if u.mesh() != v.mesh() {
        return Err(Error::InvalidArgument("bilinear operands on different meshes".into()));
    }
    if !u.is_vector() || !v.is_vector() {
        return invalid("bilinear operands must be vector trajectories");
    }
    u.grid().check_same(v.grid())
}

/// Per-sample spectra of `P∇·(u⊗v)`, arranged `[component][sample]`.
fn fluxes(u: &Trajectory, v: &Trajectory) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let uf = u.vector_frames()?;
    let vf = v.vector_frames()?;
    let per_sample = uf
        .par_iter()
        .zip(&vf)
        .map(|(a, b)| flux_spectra(a, b, true))
        .collect::<Result<Vec<_>>>()?;
    let n = u.n_components();
    let mut out: Vec<Vec<Vec<Complex64>>> = (0..n).map(|_| Vec::with_capacity(per_sample.len())).collect();
    for sample in per_sample {
        for (j, s) in sample.into_iter().enumerate() {
            out[j].push(s);
        }
    }
    Ok(out)
}

/// `B(u,v;t) = ∫_0^t e^{(t-s)Δ} P∇·(u⊗v)(s) ds` at every mesh sample.
pub fn bilinear_trajectory(u: &Trajectory, v: &Trajectory, rule: TimeRule) -> Result<Trajectory> {
    check_pair(u, v)?;
    let grid = u.grid().clone();
    let lambdas = decay_rates(&grid);
    let per_comp: Vec<Vec<Vec<Complex64>>> =
        fluxes(u, v)?.iter().map(|spectra| integrate_all(u.mesh(), rule, &lambdas, spectra)).collect();
    let mut frames = Vec::with_capacity(u.len());
    for k in 0..u.len() {
        let comps = per_comp.iter().map(|c| ScalarField::from_spectrum(&grid, c[k].clone())).collect();
        frames.push(Frame::Vector(VectorField::new(comps)?.with_tag(true)));
    }
    Trajectory::new(u.mesh().clone(), frames)
}

/// `B(u,v;t)` at a single time `t ≤ T_cap`.
pub fn bilinear_b(u: &Trajectory, v: &Trajectory, t: f64, rule: TimeRule) -> Result<VectorField> {
    check_pair(u, v)?;
    if !(t > 0.0 && t <= u.mesh().t_cap()) {
        return invalid(format!("t = {t} outside the trajectory horizon"));
    }
    let grid = u.grid();
    let lambdas = decay_rates(grid);
    let comps = fluxes(u, v)?
        .iter()
        .map(|spectra| ScalarField::from_spectrum(grid, integrate_at(u.mesh(), rule, &lambdas, spectra, t)))
        .collect();
    Ok(VectorField::new(comps)?.with_tag(true))
}

/// Measured constants of the `L^∞` and Carleson bounds for `B`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BilinearRatios {
    pub linf_ratio: f64,
    pub carleson_ratio: f64,
    pub x_norm_u: f64,
    pub x_norm_v: f64,
}

/// `sup t^{1/2}|B| / (‖u‖_X‖v‖_X)` and `Carleson(B) / (‖u‖_X‖v‖_X)` with
/// `X = X_{α;T}` on the trajectories' own horizon. Both ratios are 0
/// when either operand has zero norm.
pub fn bilinear_bounds_check(
    u: &Trajectory,
    v: &Trajectory,
    alpha: f64,
    family: &BallFamily,
) -> Result<BilinearRatios> {
    check_pair(u, v)?;
    let xu = trajectory_norm(u, TrajectoryNormKind::XAlpha(alpha), family)?.value;
    let xv = trajectory_norm(v, TrajectoryNormKind::XAlpha(alpha), family)?.value;
    if xu * xv == 0.0 {
        return Ok(BilinearRatios { linf_ratio: 0.0, carleson_ratio: 0.0, x_norm_u: xu, x_norm_v: xv });
    }
    let b = bilinear_trajectory(u, v, TimeRule::Cubic)?;
    let linf = b.sup_weighted().0;
    let carl = carleson_part(&b, alpha, family)?.value;
    Ok(BilinearRatios { linf_ratio: linf / (xu * xv), carleson_ratio: carl / (xu * xv), x_norm_u: xu, x_norm_v: xv })
}

/// Pressure `p = (-Δ)^{-1}∂_j∂_k(u_j u_k)`, mean zero, from a
/// divergence-free velocity. With this sign `(I-P)(u·∇u) = -∇p`.
pub fn pressure_from_velocity(u: &VectorField) -> Result<ScalarField> {
    let defect = u.divergence_defect();
    if defect > 1e-10 {
        return invalid(format!("velocity is not divergence-free (defect {defect:e})"));
    }
    let grid = u.grid();
    let n = grid.n_dims();
    let d = dealiased_values(u);
    let w = product_spectra(grid, &d, &d);
    let spec: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let f = grid.freq(i);
            if f.is_zero() || !keeps_mode(grid, i) {
                return Complex64::default();
            }
            let mut s = Complex64::default();
            for j in 0..n {
                for k in 0..n {
                    s += w[j][k][i] * (f.xi[j] * f.xi[k]);
                }
            }
            -s / f.xi2
        })
        .collect();
    Ok(ScalarField::from_spectrum(grid, spec))
}
