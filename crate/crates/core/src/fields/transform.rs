//! Dilations and lattice translations by exact sample rematching.
//!
//! A dilation by `λ` keeps the sample array and shrinks the box to `L/λ`:
//! node `x` of the new grid then sits at `x/λ` of the old lattice, so
//! `f_λ(x) = λ f(λx)` is read off without interpolation. Powers of two keep
//! every coordinate, radius and time exact in binary floating point.

use crate::error::{invalid, Result};
use crate::spectral::{ScalarField, VectorField};
use crate::trajectory::{Frame, Trajectory};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() && lambda.log2().fract() == 0.0 {
        Ok(())
    } else {
        invalid(format!("scale factor must be a power of two, got {lambda}"))
    }
}

/// `f_λ(x) = λ f(λx)` on the box `L/λ`.
pub fn scale_transform(f: &ScalarField, lambda: f64) -> Result<ScalarField> {
    check_lambda(lambda)?;
    f.on_box(f.grid().box_length() / lambda).map(|g| g.scaled(lambda))
}

/// `f(λx)` on the box `L/λ` (no amplitude factor).
pub fn dilate(f: &ScalarField, lambda: f64) -> Result<ScalarField> {
    check_lambda(lambda)?;
    f.on_box(f.grid().box_length() / lambda)
}

pub fn scale_transform_vector(u: &VectorField, lambda: f64) -> Result<VectorField> {
    let comps = u.components().iter().map(|c| scale_transform(c, lambda)).collect::<Result<Vec<_>>>()?;
    let tagged = u.is_divergence_free_tagged();
    Ok(VectorField::new(comps)?.with_tag(tagged))
}

/// `g_λ(t,x) = λ g(λ²t, λx)`: box `L/λ`, mesh cap `T/λ²`.
pub fn scale_transform_traj(g: &Trajectory, lambda: f64) -> Result<Trajectory> {
    check_lambda(lambda)?;
    let mesh = g.mesh().with_t_cap(g.mesh().t_cap() / (lambda * lambda))?;
    let frames = g
        .frames()
        .iter()
        .map(|fr| {
            Ok(match fr {
                Frame::Scalar(s) => Frame::Scalar(scale_transform(s, lambda)?),
                Frame::Vector(v) => Frame::Vector(scale_transform_vector(v, lambda)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(mesh, frames)
}

/// Periodic lattice shift: the value at node `i` moves to node `i + shift`.
pub fn translate(f: &ScalarField, shift: [i64; 3]) -> ScalarField {
    let grid = f.grid();
    let n = grid.n_dims();
    let res = grid.resolution() as i64;
    let vals = f.values();
    let mut out = vec![0.0; grid.len()];
    for (i, v) in vals.iter().enumerate() {
        let m = grid.multi_index(i);
        let mut t = [0usize; 3];
        for a in 0..n {
            t[a] = (m[a] as i64 + shift[a]).rem_euclid(res) as usize;
        }
        out[grid.flat_index(t)] = *v;
    }
    ScalarField::from_values(grid.clone(), out).expect("same length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn scale_round_trip_is_exact() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0] * 3.0 - x[1]);
        let back = scale_transform(&scale_transform(&f, 2.0).unwrap(), 0.5).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!(back.grid(), f.grid());
        assert!(scale_transform(&f, 3.0).is_err());
    }

    #[test]
    fn translation_wraps() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| if x[0] == 0.0 && x[1] == 0.0 { 1.0 } else { 0.0 });
        let s = translate(&f, [-1, 2, 0]);
        assert_eq!(s.values()[g.flat_index([15, 2, 0])], 1.0);
        assert_eq!(s.values().iter().sum::<f64>(), 1.0);
    }
}
