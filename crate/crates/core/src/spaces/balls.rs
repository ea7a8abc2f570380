use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 3],
    pub radius: f64,
}

/// Finite sample of `(r, x)` pairs standing in for the supremum over
/// all balls.
///
/// Radii form the dyadic chain `(L/8)·2^{-m}`, `m = 0..M-1`; for each radius
/// the centers sweep the central cube `[L/4, 3L/4]ⁿ` with stride
/// `stride_factor·r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    balls: Vec<Ball>,
    dyadic_radii: usize,
    stride_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub n_balls: usize,
    pub dyadic_radii: usize,
    pub stride_factor: f64,
}

impl BallFamily {
    pub fn new(grid: &Grid, dyadic_radii: usize, stride_factor: f64) -> Result<Self> {
        if dyadic_radii == 0 {
            return invalid("ball family needs at least one radius");
        }
        if !(stride_factor > 0.0 && stride_factor <= 0.5) {
            return invalid(format!("stride factor must lie in (0, 1/2], got {stride_factor}"));
        }
        let l = grid.box_length();
        let n = grid.n_dims();
        let mut balls = Vec::new();
        for m in 0..dyadic_radii {
            let r = l / 8.0 / 2f64.powi(m as i32);
            let stride = stride_factor * r;
            let steps = ((0.5 * l) / stride * (1.0 + 1e-12)).floor() as usize;
            let axis: Vec<f64> = (0..=steps).map(|j| 0.25 * l + j as f64 * stride).collect();
            let count = axis.len().pow(n as u32);
            for idx in 0..count {
                let mut c = [0.0; 3];
                let mut rem = idx;
                for a in (0..n).rev() {
                    c[a] = axis[rem % axis.len()];
                    rem /= axis.len();
                }
                balls.push(Ball { center: c, radius: r });
            }
        }
        Ok(Self { balls, dyadic_radii, stride_factor })
    }

    /// Four dyadic radii, stride half the radius.
    pub fn default_for(grid: &Grid) -> Self {
        Self::new(grid, 4, 0.5).expect("default family parameters are valid")
    }

    /// A family consisting of exactly the given balls.
    pub fn from_balls(balls: Vec<Ball>) -> Result<Self> {
        if balls.is_empty() || balls.iter().any(|b| !(b.radius > 0.0)) {
            return invalid("explicit family needs balls with positive radii");
        }
        Ok(Self { balls, dyadic_radii: 0, stride_factor: 0.0 })
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn summary(&self) -> FamilySummary {
        FamilySummary { n_balls: self.balls.len(), dyadic_radii: self.dyadic_radii, stride_factor: self.stride_factor }
    }

    /// The same family on a box shrunk by `lambda` (centers and radii divided).
    pub fn scaled(&self, lambda: f64) -> Self {
        let balls = self
            .balls
            .iter()
            .map(|b| {
                let mut c = b.center;
                for v in &mut c {
                    *v /= lambda;
                }
                Ball { center: c, radius: b.radius / lambda }
            })
            .collect();
        Self { balls, dyadic_radii: self.dyadic_radii, stride_factor: self.stride_factor }
    }

    /// Grid nodes inside every ball (open ball, torus metric).
    pub fn cover(&self, grid: &Grid) -> BallCover {
        let nodes = self.balls.par_iter().map(|b| ball_nodes(grid, b)).collect();
        BallCover { nodes }
    }
}

pub struct BallCover {
    nodes: Vec<Vec<usize>>,
}

impl BallCover {
    pub fn nodes(&self, ball: usize) -> &[usize] {
        &self.nodes[ball]
    }
}

fn ball_nodes(grid: &Grid, b: &Ball) -> Vec<usize> {
    let n = grid.n_dims();
    let res = grid.resolution() as i64;
    let h = grid.spacing();
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for a in 0..n {
        lo[a] = ((b.center[a] - b.radius) / h).floor() as i64 - 1;
        hi[a] = ((b.center[a] + b.radius) / h).ceil() as i64 + 1;
        if hi[a] - lo[a] + 1 > res {
            lo[a] = 0;
            hi[a] = res - 1;
        }
    }
    let mut out = Vec::new();
    let mut m = lo;
    loop {
        let mut wrapped = [0usize; 3];
        for a in 0..n {
            wrapped[a] = m[a].rem_euclid(res) as usize;
        }
        let idx = grid.flat_index(wrapped);
        if grid.torus_distance(&grid.node(idx), &b.center) < b.radius {
            out.push(idx);
        }
        // odometer over the bounding box, last axis fastest
        let mut a = n;
        loop {
            if a == 0 {
                out.sort_unstable();
                out.dedup();
                return out;
            }
            a -= 1;
            if m[a] < hi[a] {
                m[a] += 1;
                break;
            }
            m[a] = lo[a];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_family_shape() {
        let g = Grid::new(2, 64, 1.0).unwrap();
        let fam = BallFamily::default_for(&g);
        let per_radius: Vec<usize> = (0..4).map(|m| (8usize * (1 << m) + 1).pow(2)).collect();
        assert_eq!(fam.len(), per_radius.iter().sum::<usize>());
        assert_eq!(fam.balls()[0].center[0], 0.25);
        assert_eq!(fam.balls()[0].radius, 0.125);
    }

    #[test]
    fn cover_matches_brute_force() {
        let g = Grid::new(2, 32, 2.0).unwrap();
        let b = Ball { center: [0.03, 1.97, 0.0], radius: 0.25 };
        let fam = BallFamily::from_balls(vec![b]).unwrap();
        let got = fam.cover(&g).nodes(0).to_vec();
        let want: Vec<usize> =
            (0..g.len()).filter(|&i| g.torus_distance(&g.node(i), &b.center) < b.radius).collect();
        assert_eq!(got, want);
        assert!(!got.is_empty());
    }
}
