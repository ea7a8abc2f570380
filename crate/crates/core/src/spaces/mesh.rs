use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::Grid;

/// Which time measure a mesh weight integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeWeight {
    /// `t^{-α} dt` on `(0, T_cap]`; the finest cell is lumped down to `t = 0`.
    Carleson,
    /// `t^{-1-2α} dt` on `(T_cap·ρ^K, T_cap]`; the tail below the mesh is
    /// dropped (the tent integrands vanish like `t²` there).
    Tent,
}

/// Geometric partition of `(0, T_cap]`.
///
/// Nodes are `e_k = T_cap·ρ^k` for `k = 0..K-1`; cell `k` is
/// `[e_{k+1}, e_k]` and is sampled at its log-midpoint `T_cap·ρ^{k+1/2}`.
/// Trajectories live on those samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeMesh {
    t_cap: f64,
    ratio: f64,
    levels: usize,
}

/// Compact description of a mesh for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub t_cap: f64,
    pub ratio: f64,
    pub levels: usize,
}

impl TimeMesh {
    pub fn new(t_cap: f64, ratio: f64, levels: usize) -> Result<Self> {
        if !(t_cap.is_finite() && t_cap > 0.0) {
            return invalid(format!("mesh cap must be positive, got {t_cap}"));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return invalid(format!("mesh ratio must lie in (0,1), got {ratio}"));
        }
        if levels == 0 {
            return invalid("mesh needs at least one level");
        }
        Ok(Self { t_cap, ratio, levels })
    }

    /// Carleson mesh on `(0, (L/8)²]`: ratio `2^{-1/2}`, 24 levels.
    pub fn carleson_default(grid: &Grid) -> Self {
        let r = grid.box_length() / 8.0;
        Self { t_cap: r * r, ratio: std::f64::consts::FRAC_1_SQRT_2, levels: 24 }
    }

    /// Tent mesh on `(0, L/8]` (tent time has units of length).
    pub fn tent_default(grid: &Grid) -> Self {
        Self { t_cap: grid.box_length() / 8.0, ratio: std::f64::consts::FRAC_1_SQRT_2, levels: 48 }
    }

    pub fn t_cap(&self) -> f64 {
        self.t_cap
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.levels
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        self.t_cap * self.ratio.powi(k as i32)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.levels).map(|k| self.node(k)).collect()
    }

    pub fn sample(&self, k: usize) -> f64 {
        self.node(k) * self.ratio.sqrt()
    }

    /// Sample times, decreasing with the index.
    pub fn samples(&self) -> Vec<f64> {
        (0..self.levels).map(|k| self.sample(k)).collect()
    }

    /// Per-cell integrals of the requested measure.
    pub fn weights(&self, weight: TimeWeight, alpha: f64) -> Vec<f64> {
        let ln_rho = self.ratio.ln();
        (0..self.levels)
            .map(|k| {
                let top = self.node(k);
                match weight {
                    TimeWeight::Carleson => {
                        let p = 1.0 - alpha;
                        if k + 1 == self.levels {
                            top.powf(p) / p
                        } else {
                            top.powf(p) * -(p * ln_rho).exp_m1() / p
                        }
                    }
                    TimeWeight::Tent => {
                        if alpha == 0.0 {
                            -ln_rho
                        } else {
                            top.powf(-2.0 * alpha) * (-2.0 * alpha * ln_rho).exp_m1() / (2.0 * alpha)
                        }
                    }
                }
            })
            .collect()
    }

    /// Number of cells whose upper node lies at or below `horizon`; those
    /// cells are the trailing indices `K - count .. K`.
    pub(crate) fn first_cell_below(&self, horizon: f64) -> usize {
        let lim = horizon * (1.0 + 1e-12);
        (0..self.levels).find(|&k| self.node(k) <= lim).unwrap_or(self.levels)
    }

    /// Halves the log step and doubles the level count, keeping the depth.
    pub fn refined(&self) -> Self {
        Self { t_cap: self.t_cap, ratio: self.ratio.sqrt(), levels: 2 * self.levels }
    }

    /// Same ratio and depth with the cap multiplied by `factor`.
    pub fn with_t_cap(&self, t_cap: f64) -> Result<Self> {
        Self::new(t_cap, self.ratio, self.levels)
    }

    pub fn summary(&self) -> MeshSummary {
        MeshSummary { t_cap: self.t_cap, ratio: self.ratio, levels: self.levels }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carleson_weights_integrate_the_measure() {
        let m = TimeMesh::new(0.5, 0.7, 30).unwrap();
        for alpha in [0.0, 0.3, 0.9] {
            let total: f64 = m.weights(TimeWeight::Carleson, alpha).iter().sum();
            let exact = 0.5f64.powf(1.0 - alpha) / (1.0 - alpha);
            assert!((total - exact).abs() < 1e-13 * exact, "{alpha}");
        }
    }

    #[test]
    fn tent_weights_telescope() {
        let m = TimeMesh::new(1.0, 0.5, 10).unwrap();
        let alpha = 0.25;
        let total: f64 = m.weights(TimeWeight::Tent, alpha).iter().sum();
        let exact = (1024f64.powf(0.5) - 1.0) / 0.5;
        assert!((total - exact).abs() < 1e-12 * exact);
        let w0 = m.weights(TimeWeight::Tent, 0.0);
        assert!(w0.iter().all(|w| (w - 2f64.ln()).abs() < 1e-15));
    }

    #[test]
    fn horizons_land_on_nodes() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let m = TimeMesh::carleson_default(&g);
        let r: f64 = 1.0 / 32.0;
        let k = m.first_cell_below(r * r);
        assert_eq!(k, 8);
        assert!(m.first_cell_below(1e-30) == m.levels());
        let fine = m.refined();
        assert!((fine.node(fine.levels() - 1) / m.node(m.levels() - 1) - m.ratio().sqrt()).abs() < 1e-14);
    }
}
