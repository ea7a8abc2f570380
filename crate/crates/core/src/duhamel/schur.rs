use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quadrature::{exp_sinh, tanh_sinh};

/// Row and column masses of `K(s,t) = 1_{s≤t} (s/t)^{α/2} ζ² e^{-(t-s)ζ²}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchurEntry {
    pub alpha: f64,
    pub zeta: f64,
    pub t: f64,
    /// `∫_0^t K(s,t) ds`.
    pub row_mass: f64,
    /// `∫_t^∞ K(t,τ) dτ`, the column through `s = t`.
    pub column_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchurTable {
    pub entries: Vec<SchurEntry>,
    pub sup_row: f64,
    pub sup_column: f64,
}

/// Row mass after `u = (t-s)ζ²`: `∫_0^U (1 - u/U)^{α/2} e^{-u} du`, `U = tζ²`.
pub fn schur_row_mass(alpha: f64, zeta: f64, t: f64) -> f64 {
    let big_u = t * zeta * zeta;
    if alpha == 0.0 {
        return -(-big_u).exp_m1();
    }
    tanh_sinh(|u, _, to_top| (to_top / big_u).powf(0.5 * alpha) * (-u).exp(), 0.0, big_u)
}

/// Column mass after `u = (τ-s)ζ²`: `∫_0^∞ (1 + u/(sζ²))^{-α/2} e^{-u} du`.
pub fn schur_column_mass(alpha: f64, zeta: f64, s: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    let c = s * zeta * zeta;
    exp_sinh(|u| (u / c).ln_1p().mul_add(-0.5 * alpha, -u).exp())
}

pub fn schur_kernel_integrals(alpha: f64, zetas: &[f64], ts: &[f64]) -> Result<SchurTable> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("alpha must lie in [0,1), got {alpha}"));
    }
    if zetas.iter().chain(ts).any(|v| !(*v > 0.0 && v.is_finite())) {
        return invalid("zeta and t values must be positive");
    }
    let mut entries = Vec::new();
    for &zeta in zetas {
        for &t in ts {
            entries.push(SchurEntry {
                alpha,
                zeta,
                t,
                row_mass: schur_row_mass(alpha, zeta, t),
                column_mass: schur_column_mass(alpha, zeta, t),
            });
        }
    }
    let sup_row = entries.iter().map(|e| e.row_mass).fold(0.0, f64::max);
    let sup_column = entries.iter().map(|e| e.column_mass).fold(0.0, f64::max);
    Ok(SchurTable { entries, sup_row, sup_column })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_closed_forms() {
        let r = schur_row_mass(0.0, 4.0, 0.3);
        assert!((r - (1.0 - (-4.8f64).exp())).abs() < 1e-15);
        assert_eq!(schur_column_mass(0.0, 4.0, 0.3), 1.0);
    }

    #[test]
    fn kernel_masses_below_one() {
        for alpha in [0.25, 0.75, 0.95] {
            let tab = schur_kernel_integrals(alpha, &[1.0, 16.0], &[1e-4, 0.1, 10.0]).unwrap();
            assert!(tab.sup_row <= 1.0 && tab.sup_column <= 1.0);
            for e in &tab.entries {
                assert!(e.row_mass <= 1.0 - (-e.t * e.zeta * e.zeta).exp() + 1e-12);
            }
        }
    }

    #[test]
    fn row_mass_matches_beta_function_at_large_argument() {
        // U → ∞: ∫_0^U (1-u/U)^{a} e^{-u} du → 1 - a/U + O(U^{-2})
        let a = 0.4;
        let big_u = 1e4;
        let v = schur_row_mass(2.0 * a, 1.0, big_u);
        assert!((v - (1.0 - a / big_u)).abs() < 1e-7, "{v}");
    }
}
