//! Scalar quadrature rules: Gauss–Legendre panels and double-exponential
//! (tanh-sinh / exp-sinh) rules for endpoint singularities and half lines.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, via Newton on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre over `panels` equal panels of `[a, b]`.
pub fn composite_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + 0.5 * h * xi)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// tanh-sinh quadrature on `[a, b]`; tolerates integrable endpoint
/// singularities. The integrand receives `(x, distance to a, distance to b)`
/// so singular factors can be evaluated without cancellation.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let h = 1.0 / 64.0;
    let mut sum = 0.0;
    let kmax = (4.0 / h) as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let s = 0.5 * PI * t.sinh();
        let c = s.cosh();
        let w = 0.5 * PI * t.cosh() / (c * c);
        // distances of u = tanh(s) from -1 and +1, without cancellation
        let da = 2.0 * half / (1.0 + (-2.0 * s).exp());
        let db = 2.0 * half / (1.0 + (2.0 * s).exp());
        if da <= 0.0 || db <= 0.0 || w * half < 1e-300 {
            continue;
        }
        let x = a + da;
        sum += w * f(x, da, db);
    }
    sum * h * half
}

/// exp-sinh quadrature of `f` over `[0, ∞)` for integrands decaying at
/// least exponentially.
pub fn exp_sinh(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / 64.0;
    let mut sum = 0.0;
    let kmax = (4.5 / h) as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let e = (0.5 * PI * t.sinh()).exp();
        let x = e;
        let w = 0.5 * PI * t.cosh() * e;
        if !x.is_finite() || x > 700.0 {
            continue;
        }
        let v = f(x);
        if v != 0.0 {
            sum += w * v;
        }
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = tanh_sinh(|_, da, _| da.powf(-0.5), 0.0, 1.0);
        assert!((v - 2.0).abs() < 1e-10, "{v}");
        // ∫_0^1 (1-x)^{0.3} dx = 1/1.3
        let v = tanh_sinh(|_, _, db| db.powf(0.3), 0.0, 1.0);
        assert!((v - 1.0 / 1.3).abs() < 1e-12, "{v}");
    }

    #[test]
    fn exp_sinh_matches_gamma() {
        let v = exp_sinh(|x| x * x * (-x).exp());
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }
}
