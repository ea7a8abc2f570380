//! Fourier-multiplier operators on the torus.
//!
//! Every operator is diagonal in Fourier space. Conventions:
//! the zero mode is sent to zero by Riesz transforms, inverse powers of the
//! Laplacian, the Leray correction and the tent kernels. An odd symbol
//! along axis `j` (derivative, Riesz transform, gradient tent kernel) drops
//! modes whose `k_j` is the Nyquist wavenumber, which has no real odd
//! counterpart; the Leray projector drops every Nyquist-touching mode.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::field::{ScalarField, VectorField};
use super::grid::{Freq, Grid};
use crate::error::{invalid, Error, Result};

/// The four admissible kernel families of the tent characterisation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TentChoice {
    /// `t ∂_t e^{-t√-Δ}`; label `1a`.
    PoissonTime,
    /// `t ∇ e^{-t√-Δ}`; label `1b`.
    PoissonGradient,
    /// `t ∂_t e^{t²Δ}`; label `2a`.
    HeatTime,
    /// `t ∇ e^{t²Δ}`; label `2b`.
    HeatGradient,
}

impl TentChoice {
    pub const ALL: [TentChoice; 4] =
        [TentChoice::PoissonTime, TentChoice::PoissonGradient, TentChoice::HeatTime, TentChoice::HeatGradient];

    pub fn is_gradient(self) -> bool {
        matches!(self, TentChoice::PoissonGradient | TentChoice::HeatGradient)
    }

    pub fn label(self) -> &'static str {
        match self {
            TentChoice::PoissonTime => "1a",
            TentChoice::PoissonGradient => "1b",
            TentChoice::HeatTime => "2a",
            TentChoice::HeatGradient => "2b",
        }
    }
}

impl fmt::Display for TentChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TentChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1a" => Ok(TentChoice::PoissonTime),
            "1b" => Ok(TentChoice::PoissonGradient),
            "2a" => Ok(TentChoice::HeatTime),
            "2b" => Ok(TentChoice::HeatGradient),
            other => Err(Error::InvalidArgument(format!("unknown tent choice {other:?}"))),
        }
    }
}

/// A Fourier symbol; `t` is in units of `L²` for the heat family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplierSymbol {
    Heat(f64),
    Poisson(f64),
    FractionalLaplacian(f64),
    Riesz(usize),
    Derivative(usize),
    InverseLaplacian,
    Tent { choice: TentChoice, t: f64, axis: usize },
}

impl MultiplierSymbol {
    pub fn value(&self, f: &Freq) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let real = |v: f64| Complex64::new(v, 0.0);
        match *self {
            MultiplierSymbol::Heat(t) => real((-t * f.xi2).exp()),
            MultiplierSymbol::Poisson(t) => real((-t * f.norm()).exp()),
            MultiplierSymbol::FractionalLaplacian(beta) => {
                if f.is_zero() {
                    if beta == 0.0 {
                        real(1.0)
                    } else {
                        zero
                    }
                } else {
                    real(f.norm().powf(beta))
                }
            }
            MultiplierSymbol::Riesz(j) => {
                if f.is_zero() || f.nyquist_axis[j] {
                    zero
                } else {
                    i * (f.xi[j] / f.norm())
                }
            }
            MultiplierSymbol::Derivative(j) => {
                if f.nyquist_axis[j] {
                    zero
                } else {
                    i * f.xi[j]
                }
            }
            MultiplierSymbol::InverseLaplacian => {
                if f.is_zero() {
                    zero
                } else {
                    real(1.0 / f.xi2)
                }
            }
            MultiplierSymbol::Tent { choice, t, axis } => {
                if f.is_zero() {
                    return zero;
                }
                let a = f.norm();
                match choice {
                    TentChoice::PoissonTime => real(-t * a * (-t * a).exp()),
                    TentChoice::HeatTime => real(-2.0 * t * t * f.xi2 * (-t * t * f.xi2).exp()),
                    TentChoice::PoissonGradient if !f.nyquist_axis[axis] => i * (t * f.xi[axis] * (-t * a).exp()),
                    TentChoice::HeatGradient if !f.nyquist_axis[axis] => i * (t * f.xi[axis] * (-t * t * f.xi2).exp()),
                    _ => zero,
                }
            }
        }
    }
}

/// Multiplies the spectrum of `f` by `symbol`.
pub fn apply(f: &ScalarField, symbol: MultiplierSymbol) -> ScalarField {
    let grid = f.grid();
    let spec = f.spectrum();
    let out: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| spec[i] * symbol.value(&grid.freq(i)))
        .collect();
    ScalarField::from_spectrum(grid, out)
}

fn check_axis(grid: &Grid, j: usize) -> Result<()> {
    if j >= grid.n_dims() {
        return invalid(format!("axis {j} out of range for {} dimensions", grid.n_dims()));
    }
    Ok(())
}

fn check_zero_mean(f: &ScalarField, what: &str) -> Result<()> {
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    if f.mean().abs() > 1e-12 * scale {
        return invalid(format!("{what} requires a mean-zero field (mean = {:e})", f.mean()));
    }
    Ok(())
}

/// `e^{tΔ} f`.
pub fn heat_semigroup(f: &ScalarField, t: f64) -> Result<ScalarField> {
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("heat time must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(apply(f, MultiplierSymbol::Heat(t)))
}

/// `e^{-t√-Δ} f`.
pub fn poisson_semigroup(f: &ScalarField, t: f64) -> Result<ScalarField> {
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("poisson time must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(apply(f, MultiplierSymbol::Poisson(t)))
}

/// `(-Δ)^{β/2} f`; the mean is kept only for `β = 0`.
pub fn fractional_laplacian(f: &ScalarField, beta: f64) -> Result<ScalarField> {
    if !beta.is_finite() {
        return invalid("beta must be finite");
    }
    if beta < 0.0 {
        check_zero_mean(f, "negative fractional power")?;
    }
    Ok(apply(f, MultiplierSymbol::FractionalLaplacian(beta)))
}

/// `R_j = ∂_j(-Δ)^{-1/2}`.
pub fn riesz_transform(f: &ScalarField, j: usize) -> Result<ScalarField> {
    check_axis(f.grid(), j)?;
    Ok(apply(f, MultiplierSymbol::Riesz(j)))
}

pub fn derivative(f: &ScalarField, j: usize) -> Result<ScalarField> {
    check_axis(f.grid(), j)?;
    Ok(apply(f, MultiplierSymbol::Derivative(j)))
}

/// `(-Δ)^{-1} f`, modulo constants.
pub fn inverse_laplacian(f: &ScalarField) -> ScalarField {
    apply(f, MultiplierSymbol::InverseLaplacian)
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let spec = f.spectrum();
    let out = (0..grid.len()).into_par_iter().map(|i| -grid.freq(i).xi2 * spec[i]).collect();
    ScalarField::from_spectrum(grid, out)
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let comps = (0..f.grid().n_dims())
        .map(|j| apply(f, MultiplierSymbol::Derivative(j)))
        .collect();
    VectorField::new(comps).expect("gradient has n_dims components")
}

pub fn divergence(u: &VectorField) -> ScalarField {
    let grid = u.grid();
    let spectra: Vec<&[Complex64]> = u.components().iter().map(|c| c.spectrum()).collect();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let f = grid.freq(i);
            spectra
                .iter()
                .enumerate()
                .map(|(j, s)| s[i] * MultiplierSymbol::Derivative(j).value(&f))
                .sum()
        })
        .collect();
    ScalarField::from_spectrum(grid, out)
}

/// Leray projection onto divergence-free fields: `û ↦ û − ξ(ξ·û)/|ξ|²`.
pub fn leray_project(u: &VectorField) -> VectorField {
    let grid = u.grid();
    let spectra: Vec<&[Complex64]> = u.components().iter().map(|c| c.spectrum()).collect();
    let out = leray_spectra(grid, &spectra);
    let comps = out.into_iter().map(|s| ScalarField::from_spectrum(grid, s)).collect();
    VectorField::new(comps).expect("same grid").with_tag(true)
}

pub(crate) fn leray_spectra(grid: &Grid, spectra: &[&[Complex64]]) -> Vec<Vec<Complex64>> {
    let n = spectra.len();
    let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); grid.len()]; n];
    let rows: Vec<[Complex64; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let f = grid.freq(i);
            let mut v = [Complex64::default(); 3];
            for j in 0..n {
                v[j] = spectra[j][i];
            }
            project_mode(&f, &mut v, n);
            v
        })
        .collect();
    for (i, row) in rows.iter().enumerate() {
        for j in 0..n {
            out[j][i] = row[j];
        }
    }
    out
}

#[inline]
pub(crate) fn project_mode(f: &Freq, v: &mut [Complex64; 3], n: usize) {
    if f.is_zero() {
        return;
    }
    if f.nyquist {
        *v = [Complex64::default(); 3];
        return;
    }
    let dot: Complex64 = (0..n).map(|j| v[j] * f.xi[j]).sum();
    for j in 0..n {
        v[j] -= dot * (f.xi[j] / f.xi2);
    }
}

/// `f * ψ_t` for one admissible kernel family. Scalar choices return one
/// field; gradient choices return one field per axis.
pub fn tent_convolution(f: &ScalarField, choice: TentChoice, t: f64) -> Result<Vec<ScalarField>> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("tent time must be positive, got {t}"));
    }
    let axes = if choice.is_gradient() { f.grid().n_dims() } else { 1 };
    Ok((0..axes).map(|axis| apply(f, MultiplierSymbol::Tent { choice, t, axis })).collect())
}

/// Zeroes all modes with some `|k_j| > N/3` (2/3-rule truncation).
pub fn dealias(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let spec = f.spectrum();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|i| if keeps_mode(grid, i) { spec[i] } else { Complex64::default() })
        .collect();
    ScalarField::from_spectrum(grid, out)
}

#[inline]
pub(crate) fn keeps_mode(grid: &Grid, i: usize) -> bool {
    let cut = (grid.resolution() / 3) as i64;
    let f = grid.freq(i);
    (0..grid.n_dims()).all(|j| f.k[j].abs() <= cut) && !f.nyquist
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(2, 32, 1.0).unwrap()
    }

    fn smooth(g: &Grid) -> ScalarField {
        ScalarField::from_fn(g, |x| {
            (2.0 * PI * x[0]).sin() + 0.5 * (2.0 * PI * (2.0 * x[0] - 3.0 * x[1])).cos() + 0.2 * (6.0 * PI * x[1]).sin()
        })
    }

    #[test]
    fn heat_identity_and_constants() {
        let g = grid();
        let f = smooth(&g);
        assert_eq!(heat_semigroup(&f, 0.0).unwrap().values(), f.values());
        let c = ScalarField::constant(&g, 2.5);
        let h = heat_semigroup(&c, 0.3).unwrap();
        assert!(h.max_abs_diff(&c) < 1e-14);
        assert!(heat_semigroup(&f, -1.0).is_err());
        assert!(poisson_semigroup(&f, -1.0).is_err());
    }

    #[test]
    fn poisson_semigroup_law_and_eigenmode() {
        let g = grid();
        let f = smooth(&g);
        let a = poisson_semigroup(&poisson_semigroup(&f, 0.01).unwrap(), 0.02).unwrap();
        let b = poisson_semigroup(&f, 0.03).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        let mode = ScalarField::from_fn(&g, |x| (2.0 * PI * (x[0] + 2.0 * x[1])).cos());
        let t = 0.05;
        let p = poisson_semigroup(&mode, t).unwrap();
        let factor = (-t * 2.0 * PI * 5f64.sqrt()).exp();
        assert!(p.max_abs_diff(&mode.scaled(factor)) < 1e-12);
    }

    #[test]
    fn fractional_laplacian_pairs() {
        let g = grid();
        let f = smooth(&g);
        assert!(fractional_laplacian(&f, 0.0).unwrap().max_abs_diff(&f) < 1e-12);
        let inv = fractional_laplacian(&f, -1.0).unwrap();
        let back = fractional_laplacian(&inv, 1.0).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-12);
        assert!(fractional_laplacian(&f.add_constant(1.0), -1.0).is_err());
        let mode = ScalarField::from_fn(&g, |x| (2.0 * PI * 3.0 * x[1]).sin());
        let two = fractional_laplacian(&mode, 2.0).unwrap();
        let lap = laplacian(&mode).scaled(-1.0);
        assert!(two.max_abs_diff(&lap) < 1e-9);
        assert!(two.max_abs_diff(&mode.scaled((6.0 * PI).powi(2))) < 1e-9);
    }

    #[test]
    fn riesz_square_sum_is_minus_identity() {
        let g = grid();
        let f = smooth(&g);
        let mut acc = ScalarField::zeros(&g);
        for j in 0..2 {
            let r = riesz_transform(&riesz_transform(&f, j).unwrap(), j).unwrap();
            acc = acc.add(&r).unwrap();
        }
        let target = f.add_constant(-f.mean()).scaled(-1.0);
        assert!(acc.max_abs_diff(&target) < 1e-12);
        assert!(riesz_transform(&ScalarField::constant(&g, 3.0), 0).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn riesz_single_mode_symbol() {
        let g = grid();
        let mode = ScalarField::from_fn(&g, |x| (2.0 * PI * (3.0 * x[0] + 4.0 * x[1])).cos());
        // R_0 cos(ξ·x) = -(ξ_0/|ξ|) sin(ξ·x)
        let expect = ScalarField::from_fn(&g, |x| -(3.0 / 5.0) * (2.0 * PI * (3.0 * x[0] + 4.0 * x[1])).sin());
        assert!(riesz_transform(&mode, 0).unwrap().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn derivatives_closed_form() {
        let g = grid();
        let s = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0]).sin());
        let d = derivative(&s, 0).unwrap();
        let expect = ScalarField::from_fn(&g, |x| 2.0 * PI * (2.0 * PI * x[0]).cos());
        assert!(d.max_abs_diff(&expect) < 1e-12);
        assert!(derivative(&ScalarField::constant(&g, 1.0), 1).unwrap().max_abs() < 1e-15);
        let f = smooth(&g);
        let dg = divergence(&gradient(&f));
        assert!(dg.max_abs_diff(&laplacian(&f)) < 1e-12 * laplacian(&f).max_abs());
        assert!(derivative(&f, 2).is_err());
    }

    #[test]
    fn leray_kills_gradients_and_is_idempotent() {
        let g = grid();
        let f = smooth(&g);
        let grad = gradient(&f);
        assert!(leray_project(&grad).max_abs() < 1e-12 * grad.max_abs());
        let u = VectorField::new(vec![f.clone(), f.map(|v| v * v)]).unwrap();
        let p = leray_project(&u);
        let pp = leray_project(&p);
        assert!(pp.max_abs_diff(&p) < 1e-12);
        assert!(p.divergence_defect() < 1e-10);
        assert!(p.is_divergence_free_tagged());
    }

    #[test]
    fn tent_kernels() {
        let g = grid();
        for choice in TentChoice::ALL {
            for c in tent_convolution(&ScalarField::constant(&g, 4.0), choice, 0.1).unwrap() {
                assert!(c.max_abs() < 1e-14);
            }
        }
        let mode = ScalarField::from_fn(&g, |x| (2.0 * PI * 2.0 * x[0]).cos());
        let t = 0.03;
        let xi2 = (4.0 * PI).powi(2);
        let out = &tent_convolution(&mode, TentChoice::HeatTime, t).unwrap()[0];
        let factor = -2.0 * t * t * xi2 * (-t * t * xi2).exp();
        assert!(out.max_abs_diff(&mode.scaled(factor)) < 1e-12);
        let f = smooth(&g);
        let grads = tent_convolution(&f, TentChoice::PoissonGradient, t).unwrap();
        for (j, comp) in grads.iter().enumerate() {
            let direct = derivative(&poisson_semigroup(&f, t).unwrap(), j).unwrap().scaled(t);
            assert!(comp.max_abs_diff(&direct) < 1e-10);
        }
        assert!(tent_convolution(&f, TentChoice::HeatTime, 0.0).is_err());
        assert_eq!("2b".parse::<TentChoice>().unwrap(), TentChoice::HeatGradient);
        assert!("3a".parse::<TentChoice>().is_err());
    }
}
