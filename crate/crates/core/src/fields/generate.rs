use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

use super::spec::FieldSpec;
use crate::error::{invalid, Error, Result};
use crate::spectral::{derivative, leray_project, Grid, ScalarField, VectorField};
use crate::trajectory::Frame;

/// Gaussian tails below this fraction of the peak count as zero.
const SUPPORT_TOL: f64 = 1e-12;

/// Highest wavenumber per axis used by the random kinds.
const RANDOM_CUTOFF: i64 = 8;

/// Distance (in box units) from `c` to the boundary of the central cube.
fn room(grid: &Grid, c: &[f64; 3]) -> f64 {
    (0..grid.n_dims()).map(|a| (c[a] - 0.25).min(0.75 - c[a])).fold(f64::INFINITY, f64::min)
}

fn check_gaussian_support(grid: &Grid, c: &[f64; 3], w: f64) -> Result<()> {
    if !(w > 0.0) {
        return invalid(format!("bump width must be positive, got {w}"));
    }
    let limit = room(grid, c) / (2.0 * (1.0 / SUPPORT_TOL).ln()).sqrt();
    if w > limit {
        return invalid(format!(
            "bump width {w} exceeds {limit:.6} (support must stay in the central cube to 1e-12)"
        ));
    }
    Ok(())
}

fn gaussian(grid: &Grid, c: [f64; 3], w: f64, a: f64) -> ScalarField {
    let l = grid.box_length();
    let n = grid.n_dims();
    let cc = c.map(|v| v * l);
    let s = 2.0 * (w * l).powi(2);
    ScalarField::from_fn(grid, |x| {
        let d2: f64 = (0..n).map(|ax| grid.torus_delta(x[ax], cc[ax]).powi(2)).sum();
        a * (-d2 / s).exp()
    })
}

fn taylor_green(grid: &Grid, k: f64, a: f64) -> Result<VectorField> {
    let s = 2.0 * PI * k / grid.box_length();
    let n = grid.n_dims();
    let z = move |x: [f64; 3]| if n == 3 { (s * x[2]).cos() } else { 1.0 };
    let mut comps = vec![
        ScalarField::from_fn(grid, |x| a * (s * x[0]).sin() * (s * x[1]).cos() * z(x)),
        ScalarField::from_fn(grid, |x| -a * (s * x[0]).cos() * (s * x[1]).sin() * z(x)),
    ];
    if n == 3 {
        comps.push(ScalarField::zeros(grid));
    }
    VectorField::new(comps)
}

/// Random coefficients on `|k_j| ≤ cutoff`, drawn in a fixed order over
/// the half lattice so the field does not depend on the resolution.
fn random_scalar(grid: &Grid, rng: &mut ChaCha8Rng, decay: f64) -> ScalarField {
    let n = grid.n_dims();
    let res = grid.resolution();
    let cut = RANDOM_CUTOFF.min((res / 4) as i64);
    let side = (2 * cut + 1) as usize;
    let mut spec = vec![Complex64::default(); grid.len()];
    let mut power = 0.0;
    let total = grid.len() as f64;
    for idx in 0..side.pow(n as u32) {
        let mut k = [0i64; 3];
        let mut rem = idx;
        for a in (0..n).rev() {
            k[a] = (rem % side) as i64 - cut;
            rem /= side;
        }
        // keep one representative of each ±k pair
        let first = k.iter().take(n).find(|&&v| v != 0);
        if !matches!(first, Some(v) if *v > 0) {
            continue;
        }
        let k2: i64 = k.iter().map(|v| v * v).sum();
        let amp = (1.0 + k2 as f64).powf(-0.5 * decay);
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        let c = Complex64::new(re, im) * amp;
        power += c.norm_sqr() * 2.0;
        let pos = grid.flat_index(std::array::from_fn(|a| if a < n { k[a].rem_euclid(res as i64) as usize } else { 0 }));
        let neg = grid.conjugate_index(pos);
        spec[pos] = c * (0.5 * total);
        spec[neg] = c.conj() * (0.5 * total);
    }
    // RMS of Σ Re(c e^{ik·x}) is sqrt(Σ|c|²/2)
    let rms = (0.25 * power).sqrt();
    let scale = if rms > 0.0 { 1.0 / rms } else { 0.0 };
    spec.iter_mut().for_each(|c| *c *= scale);
    ScalarField::from_spectrum(grid, spec)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Builds the field described by `spec` on `grid`.
pub fn generate(spec: &FieldSpec, grid: &Grid) -> Result<Frame> {
    let l = grid.box_length();
    Ok(match *spec {
        FieldSpec::GaussianBump { center, width, amplitude } => {
            check_gaussian_support(grid, &center, width)?;
            Frame::Scalar(gaussian(grid, center, width, amplitude))
        }
        FieldSpec::SingleMode { k, amplitude, phase } => {
            let n = grid.n_dims();
            let s = 2.0 * PI / l;
            Frame::Scalar(ScalarField::from_fn(grid, |x| {
                let arg: f64 = (0..n).map(|a| k[a] as f64 * x[a]).sum::<f64>() * s;
                amplitude * (arg + phase).cos()
            }))
        }
        FieldSpec::IndicatorBall { center, radius, height } => {
            if !(radius > 0.0) || radius >= room(grid, &center) {
                return invalid(format!("ball radius {radius} leaves the central cube"));
            }
            let c = center.map(|v| v * l);
            let r = radius * l;
            Frame::Scalar(ScalarField::from_fn(grid, |x| if grid.torus_distance(&x, &c) < r { height } else { 0.0 }))
        }
        FieldSpec::TaylorGreen { amplitude } => Frame::Vector(taylor_green(grid, 1.0, amplitude)?.with_tag(true)),
        FieldSpec::TaylorGreen2 { amplitude } => {
            let a = taylor_green(grid, 1.0, amplitude)?;
            let b = taylor_green(grid, 2.0, 0.5 * amplitude)?;
            Frame::Vector(a.add(&b)?.with_tag(true))
        }
        FieldSpec::RandomSmooth { seed, decay } => Frame::Scalar(random_scalar(grid, &mut rng_for(seed, 0), decay)),
        FieldSpec::RandomDivFree { seed, decay } => {
            let comps = (0..grid.n_dims())
                .map(|j| random_scalar(grid, &mut rng_for(seed, 1 + j as u64), decay))
                .collect();
            Frame::Vector(leray_project(&VectorField::new(comps)?))
        }
        FieldSpec::VortexBump { center, width, amplitude } => {
            check_gaussian_support(grid, &center, width)?;
            let psi = gaussian(grid, center, width, amplitude);
            let mut comps = vec![derivative(&psi, 1)?, derivative(&psi, 0)?.scaled(-1.0)];
            if grid.n_dims() == 3 {
                comps.push(ScalarField::zeros(grid));
            }
            Frame::Vector(leray_project(&VectorField::new(comps)?))
        }
    })
}

pub fn generate_scalar(spec: &FieldSpec, grid: &Grid) -> Result<ScalarField> {
    match generate(spec, grid)? {
        Frame::Scalar(f) => Ok(f),
        Frame::Vector(_) => Err(Error::InvalidArgument(format!("{spec} is a vector field"))),
    }
}

pub fn generate_vector(spec: &FieldSpec, grid: &Grid) -> Result<VectorField> {
    match generate(spec, grid)? {
        Frame::Vector(v) => Ok(v),
        Frame::Scalar(_) => Err(Error::InvalidArgument(format!("{spec} is a scalar field"))),
    }
}

/// The six reference fields every measured constant refers to.
pub fn corpus_specs() -> Vec<(&'static str, FieldSpec)> {
    vec![
        ("bump_wide", FieldSpec::GaussianBump { center: [0.5, 0.5, 0.5], width: 1.0 / 40.0, amplitude: 1.0 }),
        (
            "bump_narrow",
            FieldSpec::GaussianBump { center: [0.53125, 0.46875, 0.5], width: 1.0 / 64.0, amplitude: 1.0 },
        ),
        ("random_s1", FieldSpec::RandomSmooth { seed: 1, decay: 2.0 }),
        ("random_s2", FieldSpec::RandomSmooth { seed: 2, decay: 3.0 }),
        ("mode_2_1", FieldSpec::SingleMode { k: [2, 1, 0], amplitude: 1.0, phase: 0.3 }),
        ("vortex_x", FieldSpec::VortexBump { center: [0.5, 0.5, 0.5], width: 1.0 / 40.0, amplitude: 1.0 }),
    ]
}

/// Corpus fields on `grid`; the vortex entry contributes its first component.
pub fn corpus(grid: &Grid) -> Result<Vec<(&'static str, ScalarField)>> {
    corpus_specs()
        .into_iter()
        .map(|(name, spec)| {
            let f = match generate(&spec, grid)? {
                Frame::Scalar(f) => f,
                Frame::Vector(v) => v.into_components().swap_remove(0),
            };
            Ok((name, f))
        })
        .collect()
}
