use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::balls::{Ball, BallCover, BallFamily, FamilySummary};
use super::mesh::{MeshSummary, TimeMesh, TimeWeight};
use crate::error::{invalid, Error, Result};
use crate::spectral::{heat_semigroup, tent_convolution, Grid, ScalarField, TentChoice, VectorField};
use crate::trajectory::{Frame, Trajectory};

/// A sampled norm: the maximum over a finite ball family (and time mesh),
/// hence a lower bound for the continuum supremum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub maximizing_ball: Option<Ball>,
    pub maximizing_time: Option<f64>,
    pub family: Option<FamilySummary>,
    pub mesh: Option<MeshSummary>,
}

impl NormEstimate {
    fn from_balls(value: f64, ball: Option<Ball>, family: &BallFamily) -> Self {
        Self { value, maximizing_ball: ball, maximizing_time: None, family: Some(family.summary()), mesh: None }
    }

    fn with_mesh(mut self, mesh: &TimeMesh) -> Self {
        self.mesh = Some(mesh.summary());
        self
    }

    /// Sum of component estimates; metadata comes from the largest term.
    fn sum(parts: Vec<NormEstimate>) -> NormEstimate {
        let value = parts.iter().map(|p| p.value).sum();
        let mut best = parts
            .into_iter()
            .reduce(|a, b| if b.value > a.value { b } else { a })
            .expect("at least one component");
        best.value = value;
        best
    }
}

/// Which trajectory norm [`trajectory_norm`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryNormKind {
    /// `sup t^{1/2}|g| +` the `t^{-α}` Carleson part.
    XAlpha(f64),
    /// `sup t^{1/2}|g| + sup ‖g(t)‖_{L_{2,n-2}}`.
    X2n2,
    /// `sup t^{1/2}|g| + sup t^{1/4}‖g(t)‖_{L_{4,n-2}}`.
    X42,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        invalid(format!("alpha must lie in [0,1), got {alpha}"))
    }
}

fn argmax(values: &[f64]) -> (f64, Option<usize>) {
    let mut best = (0.0, None);
    for (i, &v) in values.iter().enumerate() {
        if best.1.is_none() || v > best.0 {
            best = (v, Some(i));
        }
    }
    best
}

/// Parameters of one space-time Carleson sum.
pub(crate) struct CarlesonSum<'a> {
    pub mesh: &'a TimeMesh,
    pub weights: Vec<f64>,
    /// Time horizon of the integral for a ball of radius `r`.
    pub horizon: &'a (dyn Fn(f64) -> f64 + Sync),
    /// Exponent `e` of the prefactor `r^e`.
    pub radius_power: f64,
    pub root: bool,
}

impl CarlesonSum<'_> {
    /// Maximizes `r^e Σ_{cells ⊂ (0, h(r)]} w_k ∫_B d_k` over the family,
    /// where `d_k` is the pointwise density at sample `k`.
    ///
    /// Densities are requested from the finest cell upwards and folded into
    /// one running array, so each is computed once.
    pub fn evaluate(
        &self,
        grid: &Grid,
        family: &BallFamily,
        cover: &BallCover,
        density: impl Fn(usize) -> Result<Vec<f64>>,
    ) -> Result<(f64, Option<usize>)> {
        let balls = family.balls();
        let mut order: Vec<usize> = (0..balls.len()).collect();
        order.sort_by(|&a, &b| balls[a].radius.total_cmp(&balls[b].radius));
        let mut acc = vec![0.0; grid.len()];
        let mut next = self.mesh.len();
        let mut values = vec![0.0; balls.len()];
        let cell = grid.cell_volume();
        let mut start = 0;
        while start < order.len() {
            let r = balls[order[start]].radius;
            let end = start + order[start..].iter().take_while(|&&i| balls[i].radius == r).count();
            let first = self.mesh.first_cell_below((self.horizon)(r));
            while next > first {
                next -= 1;
                let d = density(next)?;
                let w = self.weights[next];
                acc.par_iter_mut().zip(&d).for_each(|(a, v)| *a += w * v);
            }
            let pre = r.powf(self.radius_power) * cell;
            let group: Vec<(usize, f64)> = order[start..end]
                .par_iter()
                .map(|&i| {
                    let s: f64 = cover.nodes(i).iter().map(|&j| acc[j]).sum();
                    let v = pre * s;
                    (i, if self.root { v.sqrt() } else { v })
                })
                .collect();
            for (i, v) in group {
                values[i] = v;
            }
            start = end;
        }
        Ok(argmax(&values))
    }
}

fn squared(f: &ScalarField) -> Vec<f64> {
    f.values().iter().map(|v| v * v).collect()
}

/// The `Q_α^{-1}` norm truncated at `T`:
/// `sup r^{2α-n} ∫_0^{min(r², T)} ∫_B |e^{tΔ}f|² t^{-α} dy dt`, square-rooted.
///
/// The mesh is not rebuilt for `T`; the horizon is floored to the nearest
/// mesh node, which makes the value exactly monotone in `T`.
pub fn q_inverse_norm(
    f: &ScalarField,
    alpha: f64,
    t_max: f64,
    family: &BallFamily,
    mesh: &TimeMesh,
) -> Result<NormEstimate> {
    let cover = family.cover(f.grid());
    q_inverse_with_cover(f, alpha, t_max, family, &cover, mesh)
}

fn q_inverse_with_cover(
    f: &ScalarField,
    alpha: f64,
    t_max: f64,
    family: &BallFamily,
    cover: &BallCover,
    mesh: &TimeMesh,
) -> Result<NormEstimate> {
    check_alpha(alpha)?;
    if !(t_max > 0.0) {
        return invalid(format!("T must be positive, got {t_max}"));
    }
    let horizon = move |r: f64| (r * r).min(t_max);
    let sum = CarlesonSum {
        mesh,
        weights: mesh.weights(TimeWeight::Carleson, alpha),
        horizon: &horizon,
        radius_power: 2.0 * alpha - f.grid().n_dims() as f64,
        root: true,
    };
    let (value, ball) =
        sum.evaluate(f.grid(), family, cover, |k| Ok(squared(&heat_semigroup(f, mesh.sample(k))?)))?;
    Ok(NormEstimate::from_balls(value, ball.map(|i| family.balls()[i]), family).with_mesh(mesh))
}

/// Vector `Q_α^{-1}` norm as the sum of component norms.
pub fn q_inverse_norm_vector(
    u: &VectorField,
    alpha: f64,
    t_max: f64,
    family: &BallFamily,
    mesh: &TimeMesh,
) -> Result<NormEstimate> {
    let cover = family.cover(u.grid());
    let parts = u
        .components()
        .iter()
        .map(|c| q_inverse_with_cover(c, alpha, t_max, family, &cover, mesh))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormEstimate::sum(parts))
}

/// `q_inverse_norm` at each `T` of a decreasing list.
pub fn vanishing_profile(
    f: &ScalarField,
    alpha: f64,
    t_list: &[f64],
    family: &BallFamily,
    mesh: &TimeMesh,
) -> Result<Vec<(f64, NormEstimate)>> {
    if t_list.windows(2).any(|w| w[1] > w[0]) {
        return invalid("T list must be decreasing");
    }
    let cover = family.cover(f.grid());
    t_list.iter().map(|&t| Ok((t, q_inverse_with_cover(f, alpha, t, family, &cover, mesh)?))).collect()
}

/// `sup_{t ∈ nodes} t^{1/2} max|e^{tΔ}f|` over the mesh nodes (cap included).
pub fn besov_norm(f: &ScalarField, mesh: &TimeMesh) -> Result<NormEstimate> {
    let vals = mesh
        .nodes()
        .into_par_iter()
        .map(|t| Ok((t.sqrt() * heat_semigroup(f, t)?.max_abs(), t)))
        .collect::<Result<Vec<_>>>()?;
    let (value, time) = vals.into_iter().fold((0.0, None), |a: (f64, Option<f64>), b| {
        if a.1.is_none() || b.0 > a.0 {
            (b.0, Some(b.1))
        } else {
            a
        }
    });
    Ok(NormEstimate { value, maximizing_ball: None, maximizing_time: time, family: None, mesh: Some(mesh.summary()) })
}

/// `sup_B ( r^{2-n} ∫_B |f|^p )^{1/p}` for `p ∈ {2, 4}`.
pub fn morrey_norm(f: &ScalarField, p: u32, family: &BallFamily) -> Result<NormEstimate> {
    if p != 2 && p != 4 {
        return invalid(format!("Morrey exponent must be 2 or 4, got {p}"));
    }
    let cover = family.cover(f.grid());
    let (value, ball) = morrey_with_cover(f, p, family, &cover);
    Ok(NormEstimate::from_balls(value, ball.map(|i| family.balls()[i]), family))
}

fn morrey_with_cover(f: &ScalarField, p: u32, family: &BallFamily, cover: &BallCover) -> (f64, Option<usize>) {
    let n = f.grid().n_dims() as f64;
    let cell = f.grid().cell_volume();
    let vals = f.values();
    let values: Vec<f64> = family
        .balls()
        .par_iter()
        .enumerate()
        .map(|(i, b)| {
            let s: f64 = cover.nodes(i).iter().map(|&j| vals[j].abs().powi(p as i32)).sum();
            (b.radius.powf(2.0 - n) * s * cell).powf(1.0 / p as f64)
        })
        .collect();
    argmax(&values)
}

/// Vector Morrey norm as the sum of component norms.
pub fn morrey_norm_vector(u: &VectorField, p: u32, family: &BallFamily) -> Result<NormEstimate> {
    let parts = u.components().iter().map(|c| morrey_norm(c, p, family)).collect::<Result<Vec<_>>>()?;
    Ok(NormEstimate::sum(parts))
}

/// `|||f|||_{Q_α}`: `sup ( r^{2α-n} ΣΣ_{y≠z ∈ B} |f(y)-f(z)|²/|y-z|^{n+2α} h^{2n} )^{1/2}`.
pub fn q_alpha_seminorm(f: &ScalarField, alpha: f64, family: &BallFamily) -> Result<NormEstimate> {
    check_alpha(alpha)?;
    let grid = f.grid();
    let n = grid.n_dims();
    let cover = family.cover(grid);
    let h = grid.spacing();
    let res = grid.resolution() as i64;
    let max_r = family.balls().iter().map(|b| b.radius).fold(0.0, f64::max);
    // kernel table over integer lattice offsets |d_a| <= reach
    let reach = ((2.0 * max_r / h).ceil() as i64 + 1).min(res / 2);
    let side = (2 * reach + 1) as usize;
    let table: Vec<f64> = (0..side.pow(n as u32))
        .into_par_iter()
        .map(|idx| {
            let mut rem = idx;
            let mut d2 = 0i64;
            for _ in 0..n {
                let d = (rem % side) as i64 - reach;
                rem /= side;
                d2 += d * d;
            }
            if d2 == 0 {
                0.0
            } else {
                ((d2 as f64).sqrt() * h).powf(-(n as f64 + 2.0 * alpha))
            }
        })
        .collect();
    let vals = f.values();
    let cell = grid.cell_volume();
    let values: Vec<f64> = family
        .balls()
        .par_iter()
        .enumerate()
        .map(|(i, b)| {
            let nodes = cover.nodes(i);
            let coords: Vec<[usize; 3]> = nodes.iter().map(|&j| grid.multi_index(j)).collect();
            let mut s = 0.0;
            for a in 0..nodes.len() {
                for c in a + 1..nodes.len() {
                    let mut idx = 0usize;
                    for axis in (0..n).rev() {
                        let mut d = coords[a][axis] as i64 - coords[c][axis] as i64;
                        if d > res / 2 {
                            d -= res;
                        } else if d < -res / 2 {
                            d += res;
                        }
                        idx = idx * side + (d + reach) as usize;
                    }
                    let diff = vals[nodes[a]] - vals[nodes[c]];
                    s += diff * diff * table[idx];
                }
            }
            (b.radius.powf(2.0 * alpha - n as f64) * 2.0 * s * cell * cell).sqrt()
        })
        .collect();
    let (value, ball) = argmax(&values);
    Ok(NormEstimate::from_balls(value, ball.map(|i| family.balls()[i]), family))
}

/// Campanato seminorm `sup ( r^{2(α-n)} ∫_B∫_B |f(y)-f(z)|² )^{1/2}`.
///
/// Uses `ΣΣ|f_y - f_z|² = 2m Σ|f_y - f̄_B|²` with the ball mean subtracted
/// first, so adding a constant changes nothing beyond rounding.
pub fn campanato_seminorm(f: &ScalarField, alpha: f64, family: &BallFamily) -> Result<NormEstimate> {
    if !alpha.is_finite() {
        return invalid("alpha must be finite");
    }
    let grid = f.grid();
    let n = grid.n_dims() as f64;
    let cover = family.cover(grid);
    let cell = grid.cell_volume();
    let vals = f.values();
    let values: Vec<f64> = family
        .balls()
        .par_iter()
        .enumerate()
        .map(|(i, b)| {
            let nodes = cover.nodes(i);
            if nodes.is_empty() {
                return 0.0;
            }
            let m = nodes.len() as f64;
            let mean = nodes.iter().map(|&j| vals[j]).sum::<f64>() / m;
            let ss: f64 = nodes.iter().map(|&j| (vals[j] - mean).powi(2)).sum();
            (b.radius.powf(2.0 * (alpha - n)) * 2.0 * m * ss * cell * cell).sqrt()
        })
        .collect();
    let (value, ball) = argmax(&values);
    Ok(NormEstimate::from_balls(value, ball.map(|i| family.balls()[i]), family))
}

/// BMO seminorm, the Campanato seminorm at `α = 0`.
pub fn bmo_seminorm(f: &ScalarField, family: &BallFamily) -> Result<NormEstimate> {
    campanato_seminorm(f, 0.0, family)
}

/// Tent-space characterisation with kernel family `choice`:
/// `sup ( r^{2α-n} ∫_0^r ∫_B |ψ_t * f|² t^{-1-2α} dy dt )^{1/2}`.
///
/// Gradient families sum their components in quadrature. The mesh is a
/// tent mesh (cap `L/8`, time in units of length).
pub fn tent_characterization(
    f: &ScalarField,
    alpha: f64,
    choice: TentChoice,
    family: &BallFamily,
    mesh: &TimeMesh,
) -> Result<NormEstimate> {
    check_alpha(alpha)?;
    let cover = family.cover(f.grid());
    let horizon = |r: f64| r;
    let sum = CarlesonSum {
        mesh,
        weights: mesh.weights(TimeWeight::Tent, alpha),
        horizon: &horizon,
        radius_power: 2.0 * alpha - f.grid().n_dims() as f64,
        root: true,
    };
    let (value, ball) = sum.evaluate(f.grid(), family, &cover, |k| {
        let parts = tent_convolution(f, choice, mesh.sample(k))?;
        let mut d = squared(&parts[0]);
        for p in &parts[1..] {
            d.iter_mut().zip(p.values()).for_each(|(a, v)| *a += v * v);
        }
        Ok(d)
    })?;
    Ok(NormEstimate::from_balls(value, ball.map(|i| family.balls()[i]), family).with_mesh(mesh))
}

/// `t^{-α}` Carleson part of the X-norm of a scalar trajectory, over
/// `(0, r²)` clipped to the trajectory's mesh.
fn scalar_carleson_part(
    g: &Trajectory,
    alpha: f64,
    family: &BallFamily,
    cover: &BallCover,
) -> Result<(f64, Option<usize>)> {
    let mesh = g.mesh();
    let horizon = |r: f64| r * r;
    let sum = CarlesonSum {
        mesh,
        weights: mesh.weights(TimeWeight::Carleson, alpha),
        horizon: &horizon,
        radius_power: 2.0 * alpha - g.grid().n_dims() as f64,
        root: true,
    };
    sum.evaluate(g.grid(), family, cover, |k| {
        match g.frame(k) {
            Frame::Scalar(s) => Ok(squared(s)),
            Frame::Vector(_) => Err(Error::InvalidArgument("scalar trajectory expected".into())),
        }
    })
}

/// Carleson part of the `X_{α;T}` norm, summed over components.
pub fn carleson_part(g: &Trajectory, alpha: f64, family: &BallFamily) -> Result<NormEstimate> {
    check_alpha(alpha)?;
    let cover = family.cover(g.grid());
    let parts = (0..g.n_components())
        .map(|j| {
            let c = g.component(j);
            let (v, b) = scalar_carleson_part(&c, alpha, family, &cover)?;
            Ok(NormEstimate::from_balls(v, b.map(|i| family.balls()[i]), family).with_mesh(g.mesh()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormEstimate::sum(parts))
}

/// `X_{α;T}`, `X_{2,n-2;T}` or `X_{4,2;T}` norm of a trajectory; vector
/// trajectories take the sum over components.
pub fn trajectory_norm(g: &Trajectory, kind: TrajectoryNormKind, family: &BallFamily) -> Result<NormEstimate> {
    if g.is_empty() {
        return invalid("empty trajectory");
    }
    if let TrajectoryNormKind::XAlpha(a) = kind {
        check_alpha(a)?;
    }
    let cover = family.cover(g.grid());
    let samples = g.mesh().samples();
    let mut parts = Vec::new();
    for j in 0..g.n_components() {
        let c = g.component(j);
        let (sup, t_sup) = c.sup_weighted();
        let (second, ball) = match kind {
            TrajectoryNormKind::XAlpha(a) => scalar_carleson_part(&c, a, family, &cover)?,
            TrajectoryNormKind::X2n2 | TrajectoryNormKind::X42 => {
                let (p, w) = if kind == TrajectoryNormKind::X2n2 { (2, 0.0) } else { (4, 0.25) };
                let per_time: Vec<(f64, Option<usize>)> = c
                    .frames()
                    .iter()
                    .zip(&samples)
                    .map(|(fr, t)| {
                        let Frame::Scalar(s) = fr else { unreachable!() };
                        let (v, b) = morrey_with_cover(s, p, family, &cover);
                        (t.powf(w) * v, b)
                    })
                    .collect();
                per_time.into_iter().fold((0.0, None), |a, b| if a.1.is_none() || b.0 > a.0 { b } else { a })
            }
        };
        parts.push(NormEstimate {
            value: sup + second,
            maximizing_ball: ball.map(|i| family.balls()[i]),
            maximizing_time: Some(t_sup),
            family: Some(family.summary()),
            mesh: Some(g.mesh().summary()),
        });
    }
    Ok(NormEstimate::sum(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Ball;
    use std::f64::consts::PI;

    fn bump(g: &Grid, w: f64) -> ScalarField {
        ScalarField::from_fn(g, |x| {
            let d2 = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
            (-d2 / (2.0 * w * w)).exp()
        })
    }

    #[test]
    fn zero_and_constant_fields() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let fam = BallFamily::default_for(&g);
        let mesh = TimeMesh::carleson_default(&g);
        let z = ScalarField::zeros(&g);
        let c = ScalarField::constant(&g, 3.5);
        assert_eq!(q_inverse_norm(&z, 0.3, 1.0, &fam, &mesh).unwrap().value, 0.0);
        assert_eq!(morrey_norm(&z, 2, &fam).unwrap().value, 0.0);
        assert_eq!(q_alpha_seminorm(&c, 0.5, &fam).unwrap().value, 0.0);
        assert_eq!(bmo_seminorm(&c, &fam).unwrap().value, 0.0);
        let tmesh = TimeMesh::tent_default(&g);
        for ch in TentChoice::ALL {
            assert!(tent_characterization(&c, 0.25, ch, &fam, &tmesh).unwrap().value < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let fam = BallFamily::default_for(&g);
        let mesh = TimeMesh::carleson_default(&g);
        let f = bump(&g, 0.03);
        assert!(q_inverse_norm(&f, 1.0, 1.0, &fam, &mesh).is_err());
        assert!(q_inverse_norm(&f, 0.2, 0.0, &fam, &mesh).is_err());
        assert!(q_alpha_seminorm(&f, -0.1, &fam).is_err());
        assert!(morrey_norm(&f, 3, &fam).is_err());
    }

    #[test]
    fn q_alpha_matches_naive_pairs_on_one_ball() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let f = bump(&g, 0.05);
        let b = Ball { center: [0.5, 0.5, 0.0], radius: 0.125 };
        let fam = BallFamily::from_balls(vec![b]).unwrap();
        let alpha = 0.4;
        let fast = q_alpha_seminorm(&f, alpha, &fam).unwrap().value;
        let nodes: Vec<usize> =
            (0..g.len()).filter(|&i| g.torus_distance(&g.node(i), &b.center) < b.radius).collect();
        let mut s = 0.0;
        for &y in &nodes {
            for &z in &nodes {
                if y != z {
                    let d = g.torus_distance(&g.node(y), &g.node(z));
                    s += (f.values()[y] - f.values()[z]).powi(2) / d.powf(2.0 + 2.0 * alpha);
                }
            }
        }
        let slow = (b.radius.powf(2.0 * alpha - 2.0) * s * g.cell_volume().powi(2)).sqrt();
        assert!((fast - slow).abs() < 1e-12 * slow);
    }

    #[test]
    fn campanato_matches_pair_sum() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0]).sin() + x[1]);
        let b = Ball { center: [0.4, 0.6, 0.0], radius: 0.1 };
        let fam = BallFamily::from_balls(vec![b]).unwrap();
        let nodes = fam.cover(&g).nodes(0).to_vec();
        let mut s = 0.0;
        for &y in &nodes {
            for &z in &nodes {
                s += (f.values()[y] - f.values()[z]).powi(2);
            }
        }
        let want = (b.radius.powf(2.0 * (0.3 - 2.0)) * s * g.cell_volume().powi(2)).sqrt();
        let got = campanato_seminorm(&f, 0.3, &fam).unwrap().value;
        assert!((got - want).abs() < 1e-12 * want);
        let shifted = f.add_constant(7.0);
        let a = bmo_seminorm(&f, &fam).unwrap().value;
        assert!((bmo_seminorm(&shifted, &fam).unwrap().value - a).abs() < 1e-12 * a);
        assert_eq!(a, campanato_seminorm(&f, 0.0, &fam).unwrap().value);
    }

    #[test]
    fn q_inverse_single_ball_closed_form() {
        // single mode is an eigenfunction, so the time integral is explicit
        let g = Grid::new(2, 32, 1.0).unwrap();
        let k = 2.0 * PI * 3.0;
        let f = ScalarField::from_fn(&g, |x| (k * x[0]).cos());
        let b = Ball { center: [0.5, 0.5, 0.0], radius: 0.125 };
        let fam = BallFamily::from_balls(vec![b]).unwrap();
        let mesh = TimeMesh::carleson_default(&g).refined().refined();
        let alpha = 0.0;
        let got = q_inverse_norm(&f, alpha, 1.0, &fam, &mesh).unwrap().value;
        let nodes = fam.cover(&g).nodes(0).to_vec();
        let mass: f64 = nodes.iter().map(|&j| f.values()[j].powi(2)).sum::<f64>() * g.cell_volume();
        let r2 = b.radius * b.radius;
        let time = -(-2.0 * k * k * r2).exp_m1() / (2.0 * k * k);
        let want = (b.radius.powf(-2.0) * mass * time).sqrt();
        assert!((got - want).abs() < 2e-3 * want, "{got} {want}");
    }

    #[test]
    fn trajectory_carleson_part_equals_q_inverse() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let fam = BallFamily::default_for(&g);
        let mesh = TimeMesh::carleson_default(&g);
        let f = bump(&g, 0.03);
        let traj = Trajectory::heat_flow(&f, &mesh).unwrap();
        let a = carleson_part(&traj, 0.5, &fam).unwrap().value;
        let b = q_inverse_norm(&f, 0.5, f64::INFINITY, &fam, &mesh).unwrap().value;
        assert_eq!(a, b);
        let x = trajectory_norm(&traj, TrajectoryNormKind::XAlpha(0.5), &fam).unwrap();
        assert!(x.value > a);
    }

    #[test]
    fn besov_of_constant_is_cap_value() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let mesh = TimeMesh::carleson_default(&g);
        let e = besov_norm(&ScalarField::constant(&g, -2.0), &mesh).unwrap();
        assert!((e.value - 2.0 * mesh.t_cap().sqrt()).abs() < 1e-15);
        assert_eq!(e.maximizing_time, Some(mesh.t_cap()));
    }
}
