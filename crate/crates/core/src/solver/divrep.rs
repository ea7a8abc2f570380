use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::spaces::{q_alpha_seminorm, BallFamily, NormEstimate};
use crate::spectral::{derivative, ScalarField};

#[derive(Clone, Debug, Serialize)]
pub struct DivRepresentation {
    #[serde(skip)]
    pub components: Vec<ScalarField>,
    /// `‖Σ∂_k f_k − f‖₂ / ‖f‖₂`.
    pub reconstruction_residual: f64,
    /// `Q_α` seminorm of each `f_k`.
    pub component_estimates: Vec<NormEstimate>,
}

/// `f = Σ ∂_k f_k` with `f_k = −∂_k(−Δ)^{-1} f`.
///
/// On a mode whose `k_j` is Nyquist for some axes the derivative along those
/// axes vanishes, so the denominator only sums `ξ_j²` over the remaining
/// axes. The identity then holds on every mode except those whose axes are
/// all Nyquist or zero, such as `(N/2, 0)`: every grid derivative vanishes
/// there, so they are not the divergence of any field on the grid.
pub fn div_representation(f: &ScalarField, alpha: f64, family: &BallFamily) -> Result<DivRepresentation> {
    let (components, reconstruction_residual) = div_components(f)?;
    let component_estimates =
        components.iter().map(|c| q_alpha_seminorm(c, alpha, family)).collect::<Result<Vec<_>>>()?;
    Ok(DivRepresentation { components, reconstruction_residual, component_estimates })
}

/// Components `f_k` and the reconstruction residual of
/// [`div_representation`], without the seminorm estimates.
pub fn div_components(f: &ScalarField) -> Result<(Vec<ScalarField>, f64)> {
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    if f.mean().abs() > 1e-12 * scale {
        return invalid(format!("divergence representation needs mean-zero data (mean = {:e})", f.mean()));
    }
    let grid = f.grid();
    let n = grid.n_dims();
    let spec = f.spectrum();
    let components: Vec<ScalarField> = (0..n)
        .map(|k| {
            let out: Vec<Complex64> = (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let fr = grid.freq(i);
                    if fr.nyquist_axis[k] {
                        return Complex64::default();
                    }
                    let d: f64 = (0..n).filter(|&j| !fr.nyquist_axis[j]).map(|j| fr.xi[j] * fr.xi[j]).sum();
                    if d == 0.0 {
                        return Complex64::default();
                    }
                    spec[i] * Complex64::new(0.0, -fr.xi[k] / d)
                })
                .collect();
            ScalarField::from_spectrum(grid, out)
        })
        .collect();
    let mut sum = ScalarField::zeros(grid);
    for (k, c) in components.iter().enumerate() {
        sum = sum.add(&derivative(c, k)?)?;
    }
    let norm = f.l2_norm();
    let residual = if norm == 0.0 { 0.0 } else { sum.sub(f)?.l2_norm() / norm };
    Ok((components, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{laplacian, Grid};
    use std::f64::consts::TAU;

    #[test]
    fn laplacian_data_gives_gradient() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let phi = ScalarField::from_fn(&g, |x| (TAU * x[0]).sin() * (2.0 * TAU * x[1]).cos());
        let f = laplacian(&phi);
        let fam = BallFamily::new(&g, 2, 0.5).unwrap();
        let rep = div_representation(&f, 0.5, &fam).unwrap();
        for k in 0..2 {
            let d = derivative(&phi, k).unwrap();
            assert!(rep.components[k].max_abs_diff(&d) < 1e-12 * d.max_abs().max(1.0));
        }
        assert!(rep.reconstruction_residual < 1e-14);
    }

    #[test]
    fn nyquist_content_is_reconstructed() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        // Nyquist along x only, ordinary along y
        let f = ScalarField::from_fn(&g, |x| (16.0 * std::f64::consts::PI * x[0]).cos() * (TAU * x[1]).sin());
        let fam = BallFamily::new(&g, 1, 0.5).unwrap();
        let rep = div_representation(&f, 0.5, &fam).unwrap();
        assert!(rep.reconstruction_residual < 1e-13, "{}", rep.reconstruction_residual);
        assert!(div_representation(&f.add_constant(1.0), 0.5, &fam).is_err());
    }
}
