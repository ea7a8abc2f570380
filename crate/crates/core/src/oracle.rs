//! Slow reference implementations for cross-checking the fast paths:
//! direct periodic heat-kernel convolution, naive double sums over one
//! ball, and dense quadrature in `log t`.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::quadrature::composite_gauss;
use crate::spaces::{Ball, TimeMesh};
use crate::spectral::{Grid, ScalarField};

/// Largest admitted image-sum truncation bound.
const TAIL_TOL: f64 = 1e-14;

/// `e^{tΔ}f` as the node sum against the periodised Gaussian
/// `(4πt)^{-n/2} Σ_m exp(-|x-y+mL|²/4t)`, images `|m_j| ≤ image_count`.
///
/// The sampled kernel is renormalised to unit discrete mass, so the mean is
/// preserved up to rounding.
pub fn direct_heat_convolution(f: &ScalarField, t: f64, image_count: usize) -> Result<ScalarField> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("heat time must be positive, got {t}"));
    }
    let grid = f.grid();
    let n = grid.n_dims();
    let (res, h, l) = (grid.resolution(), grid.spacing(), grid.box_length());
    let m = image_count as f64;
    // omitted images sit at distance >= m·L from the target node
    let tail = (4.0 * PI * t).powf(-0.5 * n as f64) * l.powi(n as i32) * (2.0 * m + 3.0).powi(n as i32)
        * (-(m * l).powi(2) / (4.0 * t)).exp();
    if image_count == 0 || tail > TAIL_TOL {
        return Err(Error::Inconsistent(format!(
            "image sum with {image_count} shells has tail bound {tail:e} at t = {t:e}"
        )));
    }
    // periodised 1-D factor by lattice offset; the Gaussian is separable
    let k1: Vec<f64> = (0..res)
        .map(|d| {
            let x = d as f64 * h;
            (-(image_count as i64)..=image_count as i64)
                .map(|j| (-(x + j as f64 * l).powi(2) / (4.0 * t)).exp())
                .sum()
        })
        .collect();
    let mass: f64 = k1.iter().sum::<f64>().powi(n as i32);
    let vals = f.values();
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let a = grid.multi_index(i);
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                let b = grid.multi_index(j);
                let mut w = 1.0;
                for ax in 0..n {
                    w *= k1[(a[ax] + res - b[ax]) % res];
                }
                s += w * v;
            }
            s / mass
        })
        .collect();
    ScalarField::from_values(grid.clone(), out)
}

fn ball_points(grid: &Grid, ball: &Ball) -> Vec<[f64; 3]> {
    (0..grid.len())
        .map(|i| grid.node(i))
        .filter(|x| grid.torus_distance(x, &ball.center) < ball.radius)
        .collect()
}

/// `( r^{2α-n} Σ_{y≠z} |f(y)-f(z)|²/|y-z|^{n+2α} h^{2n} )^{1/2}` over the
/// nodes of `grid` inside `ball`, with `f` sampled pointwise. Pass a finer
/// grid than the fast estimator used to get a refinement oracle.
pub fn direct_double_sum_q(f: impl Fn([f64; 3]) -> f64 + Sync, grid: &Grid, alpha: f64, ball: &Ball) -> f64 {
    let n = grid.n_dims() as f64;
    let pts = ball_points(grid, ball);
    let vals: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
    let rows: Vec<f64> = (0..pts.len())
        .into_par_iter()
        .map(|a| {
            let mut s = 0.0;
            for c in 0..pts.len() {
                if c != a {
                    let d = grid.torus_distance(&pts[a], &pts[c]);
                    s += (vals[a] - vals[c]).powi(2) / d.powf(n + 2.0 * alpha);
                }
            }
            s
        })
        .collect();
    let s: f64 = rows.iter().sum();
    (ball.radius.powf(2.0 * alpha - n) * s * grid.cell_volume().powi(2)).sqrt()
}

/// `( r^{2(α-n)} Σ_{y,z} |f(y)-f(z)|² h^{2n} )^{1/2}` over one ball; BMO at
/// `α = 0`.
pub fn direct_double_sum_campanato(
    f: impl Fn([f64; 3]) -> f64 + Sync,
    grid: &Grid,
    alpha: f64,
    ball: &Ball,
) -> f64 {
    let n = grid.n_dims() as f64;
    let vals: Vec<f64> = ball_points(grid, ball).into_iter().map(f).collect();
    let rows: Vec<f64> = vals.par_iter().map(|a| vals.iter().map(|b| (a - b).powi(2)).sum()).collect();
    let s: f64 = rows.iter().sum();
    (ball.radius.powf(2.0 * (alpha - n)) * s * grid.cell_volume().powi(2)).sqrt()
}

/// `∫_0^T t^{-α} g(t) dt` by Gauss–Legendre in `u = log t` down to the
/// deepest node of `mesh`, with `density × K` panels of order 8, plus the
/// tail `g(t_min) t_min^{1-α}/(1-α)`.
pub fn dense_time_quadrature(
    g: impl Fn(f64) -> f64,
    alpha: f64,
    t_max: f64,
    mesh: &TimeMesh,
    density: usize,
) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("alpha must lie in [0,1), got {alpha}"));
    }
    if density < 4 {
        return invalid("dense quadrature needs at least 4x the mesh node count");
    }
    let t_min = mesh.node(mesh.len() - 1).min(t_max);
    if !(t_max > 0.0) {
        return invalid("T must be positive");
    }
    let panels = density * mesh.len();
    let body = composite_gauss(|u| (u * (1.0 - alpha)).exp() * g(u.exp()), t_min.ln(), t_max.ln(), panels, 8);
    Ok(body + g(t_min) * t_min.powf(1.0 - alpha) / (1.0 - alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::heat_semigroup;
    use std::f64::consts::TAU;

    #[test]
    fn convolution_matches_single_mode() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| (TAU * x[0]).cos() + 0.5);
        let t = 1e-2;
        let d = direct_heat_convolution(&f, t, 3).unwrap();
        let s = heat_semigroup(&f, t).unwrap();
        assert!(d.max_abs_diff(&s) < 1e-12);
        assert!((d.mean() - f.mean()).abs() < 1e-14);
        assert!(direct_heat_convolution(&f, 1.0, 1).is_err());
    }

    #[test]
    fn double_sums_vanish_on_constants() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let b = Ball { center: [0.5, 0.5, 0.0], radius: 0.2 };
        assert_eq!(direct_double_sum_q(|_| 3.0, &g, 0.5, &b), 0.0);
        assert_eq!(direct_double_sum_campanato(|_| 3.0, &g, 0.0, &b), 0.0);
    }

    #[test]
    fn unweighted_quadrature_is_plain_integral() {
        let mesh = TimeMesh::new(1.0, 0.5, 40).unwrap();
        let v = dense_time_quadrature(|t| 2.0 + 3.0 * t, 0.0, 0.8, &mesh, 4).unwrap();
        assert!((v - (1.6 + 1.5 * 0.64)).abs() < 1e-10);
    }
}
