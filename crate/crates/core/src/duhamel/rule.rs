//! Exponential product integration of `G(t) = ∫_0^t e^{-(t-s)λ} N(s) ds`
//! per Fourier mode, for `N` known at the samples of a [`TimeMesh`].

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::spaces::TimeMesh;

/// How the integrand is reconstructed between samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeRule {
    /// Cubic Lagrange interpolation on the causal stencil of the last four
    /// samples, integrated exactly against the exponential; the integrand
    /// is held constant below the earliest sample.
    Cubic,
    /// Each sample is constant on its own mesh cell.
    CellConstant,
}

/// `g_m(z) = ∫_0^1 e^{-z(1-θ)} θ^m dθ` for `m = 0..=3`.
pub(crate) fn phi(z: f64) -> [f64; 4] {
    let mut g = [0.0; 4];
    if z < 2.0 {
        for (m, gm) in g.iter_mut().enumerate() {
            // m! Σ_j (-z)^j / (m+j+1)!
            let mut term = 1.0 / (m as f64 + 1.0);
            let mut s = term;
            for j in 1..40 {
                term *= -z / (m as f64 + j as f64 + 1.0);
                s += term;
                if term.abs() < 1e-17 * s.abs() {
                    break;
                }
            }
            *gm = s;
        }
    } else {
        g[0] = -(-z).exp_m1() / z;
        for m in 1..4 {
            g[m] = (1.0 - m as f64 * g[m - 1]) / z;
        }
    }
    g
}

/// Monomial coefficients in `θ = (s-a)/(b-a)` of the Lagrange basis through
/// `nodes`; row `j` belongs to node `j`.
fn lagrange_monomials(nodes: &[f64], a: f64, b: f64) -> Vec<[f64; 4]> {
    let d = b - a;
    let th: Vec<f64> = nodes.iter().map(|x| (x - a) / d).collect();
    (0..th.len())
        .map(|j| {
            let mut poly = [0.0; 4];
            poly[0] = 1.0;
            let mut deg = 0;
            for (m, &tm) in th.iter().enumerate() {
                if m == j {
                    continue;
                }
                let den = th[j] - tm;
                let mut next = [0.0; 4];
                for p in 0..=deg {
                    next[p + 1] += poly[p] / den;
                    next[p] -= poly[p] * tm / den;
                }
                poly = next;
                deg += 1;
            }
            poly
        })
        .collect()
}

/// One product-integration step over `[a, b]`: per-node weight factors.
struct Step {
    a: f64,
    b: f64,
    stencil: Vec<usize>,
    basis: Vec<[f64; 4]>,
}

impl Step {
    fn new(times: &[f64], stencil: Vec<usize>, a: f64, b: f64) -> Self {
        let nodes: Vec<f64> = stencil.iter().map(|&i| times[i]).collect();
        let basis = lagrange_monomials(&nodes, a, b);
        Self { a, b, stencil, basis }
    }

    /// Adds `∫_a^b e^{-(b-s)λ} p(s) ds` to `decayed·G` for one mode.
    fn apply(&self, g_prev: Complex64, lambda: f64, n: &[&[Complex64]], mode: usize) -> Complex64 {
        let d = self.b - self.a;
        let z = d * lambda;
        let ph = phi(z);
        let mut out = g_prev * (-z).exp();
        for (row, &i) in self.basis.iter().zip(&self.stencil) {
            let w = d * (row[0] * ph[0] + row[1] * ph[1] + row[2] * ph[2] + row[3] * ph[3]);
            out += n[i][mode] * w;
        }
        out
    }
}

fn stencil_ending_at(i: usize) -> Vec<usize> {
    (i.saturating_sub(3)..=i).collect()
}

/// Integral at every sample, indexed like the mesh (latest time first).
///
/// `spectra[k]` is `N̂` at `mesh.sample(k)`; `lambdas` holds the decay rate
/// of each mode.
pub(crate) fn integrate_all(
    mesh: &TimeMesh,
    rule: TimeRule,
    lambdas: &[f64],
    spectra: &[Vec<Complex64>],
) -> Vec<Vec<Complex64>> {
    let big_k = mesh.len();
    match rule {
        TimeRule::Cubic => {
            // ascending order
            let times: Vec<f64> = (0..big_k).rev().map(|k| mesh.sample(k)).collect();
            let n: Vec<&[Complex64]> = (0..big_k).rev().map(|k| spectra[k].as_slice()).collect();
            let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(big_k);
            let first: Vec<Complex64> = lambdas
                .par_iter()
                .enumerate()
                .map(|(m, &l)| n[0][m] * (times[0] * phi(times[0] * l)[0]))
                .collect();
            out.push(first);
            for i in 1..big_k {
                let step = Step::new(&times, stencil_ending_at(i), times[i - 1], times[i]);
                let prev = &out[i - 1];
                let next: Vec<Complex64> =
                    lambdas.par_iter().enumerate().map(|(m, &l)| step.apply(prev[m], l, &n, m)).collect();
                out.push(next);
            }
            out.reverse();
            out
        }
        TimeRule::CellConstant => {
            let lower = |k: usize| if k + 1 < big_k { mesh.node(k + 1) } else { 0.0 };
            let mut h = vec![Complex64::default(); lambdas.len()];
            let mut out = vec![Vec::new(); big_k];
            for k in (0..big_k).rev() {
                let a = lower(k);
                let s = mesh.sample(k);
                let e = mesh.node(k);
                let nk = &spectra[k];
                out[k] = lambdas
                    .par_iter()
                    .enumerate()
                    .map(|(m, &l)| {
                        let d = s - a;
                        h[m] * (-d * l).exp() + nk[m] * (d * phi(d * l)[0])
                    })
                    .collect();
                h = lambdas
                    .par_iter()
                    .enumerate()
                    .map(|(m, &l)| {
                        let d = e - a;
                        h[m] * (-d * l).exp() + nk[m] * (d * phi(d * l)[0])
                    })
                    .collect();
            }
            out
        }
    }
}

/// Integral at an arbitrary time `t`, using only samples at or before `t`
/// (the earliest sample stands in for the integrand on `[0, σ_0]`).
pub(crate) fn integrate_at(
    mesh: &TimeMesh,
    rule: TimeRule,
    lambdas: &[f64],
    spectra: &[Vec<Complex64>],
    t: f64,
) -> Vec<Complex64> {
    let big_k = mesh.len();
    match rule {
        TimeRule::Cubic => {
            let times: Vec<f64> = (0..big_k).rev().map(|k| mesh.sample(k)).collect();
            let n: Vec<&[Complex64]> = (0..big_k).rev().map(|k| spectra[k].as_slice()).collect();
            let last = times.iter().rposition(|&s| s <= t);
            let Some(p) = last else {
                return lambdas.par_iter().enumerate().map(|(m, &l)| n[0][m] * (t * phi(t * l)[0])).collect();
            };
            let mut g: Vec<Complex64> = lambdas
                .par_iter()
                .enumerate()
                .map(|(m, &l)| n[0][m] * (times[0] * phi(times[0] * l)[0]))
                .collect();
            for i in 1..=p {
                let step = Step::new(&times, stencil_ending_at(i), times[i - 1], times[i]);
                g = lambdas.par_iter().enumerate().map(|(m, &l)| step.apply(g[m], l, &n, m)).collect();
            }
            if t > times[p] {
                let step = Step::new(&times, stencil_ending_at(p), times[p], t);
                g = lambdas.par_iter().enumerate().map(|(m, &l)| step.apply(g[m], l, &n, m)).collect();
            }
            g
        }
        TimeRule::CellConstant => {
            let lower = |k: usize| if k + 1 < big_k { mesh.node(k + 1) } else { 0.0 };
            let cells: Vec<(usize, f64, f64)> = (0..big_k)
                .filter_map(|k| {
                    let a = lower(k);
                    (a < t).then(|| (k, a, mesh.node(k).min(t)))
                })
                .collect();
            lambdas
                .par_iter()
                .enumerate()
                .map(|(m, &l)| {
                    cells.iter().fold(Complex64::default(), |acc, &(k, a, b)| {
                        let d = b - a;
                        acc + spectra[k][m] * ((-(t - b) * l).exp() * d * phi(d * l)[0])
                    })
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_branches_agree() {
        for z in [1.999, 2.0, 2.001] {
            let a = phi(z);
            // independent evaluation by dense Gauss–Legendre
            for m in 0..4 {
                let v = crate::quadrature::composite_gauss(
                    |th| (-z * (1.0 - th)).exp() * th.powi(m as i32),
                    0.0,
                    1.0,
                    4,
                    10,
                );
                assert!((a[m] - v).abs() < 1e-14, "z={z} m={m}");
            }
        }
        assert_eq!(phi(0.0), [1.0, 0.5, 1.0 / 3.0, 0.25]);
    }

    #[test]
    fn cubic_rule_is_exact_for_cubics() {
        let mesh = TimeMesh::new(1.0, 0.8, 120).unwrap();
        let lam = [0.0, 3.0, 50.0];
        let poly = |s: f64| 1.0 + s - 2.0 * s * s + 0.5 * s.powi(3);
        let spectra: Vec<Vec<Complex64>> =
            (0..mesh.len()).map(|k| vec![Complex64::new(poly(mesh.sample(k)), 0.0); 3]).collect();
        let all = integrate_all(&mesh, TimeRule::Cubic, &lam, &spectra);
        let s0 = mesh.sample(mesh.len() - 1);
        for (m, &l) in lam.iter().enumerate() {
            for k in [0usize, 5, 20] {
                let t = mesh.sample(k);
                // exact integral on [s0, t] plus the constant piece on [0, s0]
                let body = crate::quadrature::composite_gauss(|s| (-(t - s) * l).exp() * poly(s), s0, t, 64, 10);
                let head = poly(s0) * crate::quadrature::composite_gauss(|s| (-(t - s) * l).exp(), 0.0, s0, 4, 10);
                let want = body + head;
                assert!((all[k][m].re - want).abs() < 1e-12 * want.abs().max(1e-3), "{m} {k}");
            }
        }
        let t = 0.5 * (mesh.sample(3) + mesh.sample(4));
        let at = integrate_at(&mesh, TimeRule::Cubic, &lam, &spectra, t);
        let body = crate::quadrature::composite_gauss(|s| (-(t - s) * 3.0).exp() * poly(s), s0, t, 64, 10);
        let head = poly(s0) * crate::quadrature::composite_gauss(|s| (-(t - s) * 3.0).exp(), 0.0, s0, 4, 10);
        assert!((at[1].re - body - head).abs() < 1e-12);
    }

    #[test]
    fn cell_constant_all_matches_pointwise() {
        let mesh = TimeMesh::new(1.0, 0.6, 12).unwrap();
        let lam = [0.0, 7.0];
        let spectra: Vec<Vec<Complex64>> =
            (0..mesh.len()).map(|k| vec![Complex64::new(1.0 + k as f64, -0.5); 2]).collect();
        let all = integrate_all(&mesh, TimeRule::CellConstant, &lam, &spectra);
        for k in 0..mesh.len() {
            let at = integrate_at(&mesh, TimeRule::CellConstant, &lam, &spectra, mesh.sample(k));
            for m in 0..2 {
                assert!((all[k][m] - at[m]).norm() < 1e-13 * at[m].norm());
            }
        }
        // λ = 0 with unit integrand integrates to t
        let ones: Vec<Vec<Complex64>> = (0..mesh.len()).map(|_| vec![Complex64::new(1.0, 0.0)]).collect();
        let all = integrate_all(&mesh, TimeRule::CellConstant, &[0.0], &ones);
        assert!((all[2][0].re - mesh.sample(2)).abs() < 1e-15);
    }
}
