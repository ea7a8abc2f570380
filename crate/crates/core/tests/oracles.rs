//! Fast estimators against frozen values of the direct oracles.
//!
//! The reference numbers were produced by `direct_double_sum_q` and
//! `direct_double_sum_campanato` on a 128² grid; the tests pin those and
//! compare the production estimators at lower resolution.

use std::f64::consts::PI;

use qspace::duhamel::lemma23_check;
use qspace::oracle::{
    dense_time_quadrature, direct_double_sum_campanato, direct_double_sum_q, direct_heat_convolution,
};
use qspace::spaces::{campanato_seminorm, q_alpha_seminorm, Ball, BallFamily, TimeMesh};
use qspace::spectral::heat_semigroup;
use qspace::{Grid, ScalarField, Trajectory};

fn wave(x: [f64; 3]) -> f64 {
    (2.0 * PI * 2.0 * x[0]).sin() * (2.0 * PI * x[1]).cos()
}

const BALL: Ball = Ball { center: [0.5, 0.5, 0.0], radius: 0.125 };

/// `(alpha, oracle at 128²)`.
const Q_ORACLE: [(f64, f64); 2] = [(0.25, 2.9199807850), (0.5, 3.3856855280)];
const BMO_ORACLE: f64 = 2.6439868353;

fn one_ball() -> BallFamily {
    BallFamily::from_balls(vec![BALL]).unwrap()
}

#[test]
fn oracle_values_are_reproduced() {
    let fine = Grid::new(2, 128, 1.0).unwrap();
    for (a, frozen) in Q_ORACLE {
        let v = direct_double_sum_q(wave, &fine, a, &BALL);
        assert!((v - frozen).abs() < 1e-9 * frozen, "alpha {a}: {v}");
    }
    let v = direct_double_sum_campanato(wave, &fine, 0.0, &BALL);
    assert!((v - BMO_ORACLE).abs() < 1e-9 * BMO_ORACLE, "{v}");
}

#[test]
fn q_alpha_at_half_resolution_is_within_five_percent() {
    let g = Grid::new(2, 64, 1.0).unwrap();
    let f = ScalarField::from_fn(&g, wave);
    for (a, frozen) in Q_ORACLE {
        let v = q_alpha_seminorm(&f, a, &one_ball()).unwrap().value;
        assert!((v - frozen).abs() < 0.05 * frozen, "alpha {a}: {v} vs {frozen}");
    }
}

#[test]
fn q_alpha_error_shrinks_with_resolution() {
    for (a, frozen) in Q_ORACLE {
        let err = |r: usize| {
            let g = Grid::new(2, r, 1.0).unwrap();
            let v = q_alpha_seminorm(&ScalarField::from_fn(&g, wave), a, &one_ball()).unwrap().value;
            (v - frozen).abs()
        };
        assert!(err(64) < 0.6 * err(32), "alpha {a}");
    }
}

#[test]
fn bmo_at_half_resolution_is_within_ten_percent() {
    let g = Grid::new(2, 64, 1.0).unwrap();
    let v = campanato_seminorm(&ScalarField::from_fn(&g, wave), 0.0, &one_ball()).unwrap().value;
    assert!((v - BMO_ORACLE).abs() < 0.1 * BMO_ORACLE, "{v}");
}

/// For `f(s) = e^{sΔ}φ` with a single eigenmode `φ` the Duhamel integral is
/// `t λ e^{-tλ} φ`, so the left side of the `L²` estimate is a scalar time
/// integral.
#[test]
fn lemma_integral_matches_dense_quadrature() {
    let g = Grid::new(2, 16, 1.0).unwrap();
    let f = ScalarField::from_fn(&g, wave);
    let lam = 4.0 * PI * PI * 5.0;
    let l2 = f.l2_norm().powi(2);
    let mesh = TimeMesh::new(1.0, 0.5f64.sqrt(), 40).unwrap();
    let traj = Trajectory::heat_flow(&f, &mesh).unwrap();
    for a in [0.0, 0.5, 0.75] {
        let lhs = lemma23_check(&traj, a, 1.0).unwrap().lhs;
        let dense =
            dense_time_quadrature(|t| (t * lam).powi(2) * (-2.0 * t * lam).exp() * l2, a, 1.0, &mesh, 8).unwrap();
        assert!((lhs - dense).abs() < 0.02 * dense, "alpha {a}: {lhs} vs {dense}");
    }
}

#[test]
fn spectral_heat_matches_direct_convolution() {
    let g = Grid::new(2, 32, 1.0).unwrap();
    let f = ScalarField::from_fn(&g, |x| wave(x) + 0.3 * (2.0 * PI * (3.0 * x[0] - 5.0 * x[1])).cos());
    for t in [1e-3, 1e-2] {
        let a = heat_semigroup(&f, t).unwrap();
        let b = direct_heat_convolution(&f, t, 3).unwrap();
        assert!(a.sub(&b).unwrap().l2_norm() < 1e-8 * a.l2_norm(), "t = {t}");
    }
}
