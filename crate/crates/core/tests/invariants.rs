use proptest::prelude::*;

use qspace::duhamel::{schur_column_mass, schur_row_mass};
use qspace::fields::{generate_scalar, generate_vector, translate, FieldSpec};
use qspace::spaces::{campanato_seminorm, Ball, morrey_norm, q_alpha_seminorm, q_inverse_norm, BallFamily, TimeMesh};
use qspace::spectral::{divergence, heat_semigroup, leray_project};
use qspace::{Grid, ScalarField};

fn grid() -> Grid {
    Grid::new(2, 16, 1.0).unwrap()
}

fn random(seed: u64, decay: f64) -> ScalarField {
    generate_scalar(&FieldSpec::RandomSmooth { seed, decay }, &grid()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norms_are_absolutely_homogeneous(seed in 0u64..1000, c in -50.0f64..50.0, alpha in 0.0f64..0.95) {
        let f = random(seed, 2.0);
        let g = f.scaled(c);
        let fam = BallFamily::default_for(&grid());
        let mesh = TimeMesh::carleson_default(&grid());
        let t = mesh.t_cap();
        prop_assert!(close(
            q_inverse_norm(&g, alpha, t, &fam, &mesh).unwrap().value,
            c.abs() * q_inverse_norm(&f, alpha, t, &fam, &mesh).unwrap().value,
            1e-12,
        ));
        prop_assert!(close(
            morrey_norm(&g, 2, &fam).unwrap().value,
            c.abs() * morrey_norm(&f, 2, &fam).unwrap().value,
            1e-12,
        ));
        prop_assert!(close(
            q_alpha_seminorm(&g, alpha, &fam).unwrap().value,
            c.abs() * q_alpha_seminorm(&f, alpha, &fam).unwrap().value,
            1e-12,
        ));
    }

    #[test]
    fn seminorms_ignore_constants(seed in 0u64..1000, c in -10.0f64..10.0, alpha in 0.0f64..0.95) {
        let f = random(seed, 3.0);
        let fam = BallFamily::default_for(&grid());
        let base = campanato_seminorm(&f, alpha, &fam).unwrap().value;
        prop_assert!(close(campanato_seminorm(&f.add_constant(c), alpha, &fam).unwrap().value, base, 1e-9));
        let q = q_alpha_seminorm(&f, alpha, &fam).unwrap().value;
        prop_assert!(close(q_alpha_seminorm(&f.add_constant(c), alpha, &fam).unwrap().value, q, 1e-9));
    }

    #[test]
    fn q_inverse_is_subadditive(s1 in 0u64..1000, s2 in 0u64..1000, alpha in 0.0f64..0.95) {
        let (f, g) = (random(s1, 2.0), random(s2, 2.5));
        let fam = BallFamily::default_for(&grid());
        let mesh = TimeMesh::carleson_default(&grid());
        let t = mesh.t_cap();
        let q = |h: &ScalarField| q_inverse_norm(h, alpha, t, &fam, &mesh).unwrap().value;
        prop_assert!(q(&f.add(&g).unwrap()) <= (q(&f) + q(&g)) * (1.0 + 1e-12));
    }

    #[test]
    fn q_inverse_is_monotone_in_the_horizon(seed in 0u64..1000, alpha in 0.0f64..0.95, lo in 0.01f64..1.0) {
        let f = random(seed, 2.0);
        let fam = BallFamily::default_for(&grid());
        let mesh = TimeMesh::carleson_default(&grid());
        let t = mesh.t_cap();
        let small = q_inverse_norm(&f, alpha, lo * t, &fam, &mesh).unwrap().value;
        let large = q_inverse_norm(&f, alpha, t, &fam, &mesh).unwrap().value;
        prop_assert!(small <= large);
    }

    #[test]
    fn heat_commutes_with_lattice_shifts(seed in 0u64..1000, dx in -16i64..16, dy in -16i64..16, t in 1e-5f64..1e-1) {
        let f = random(seed, 2.0);
        let a = heat_semigroup(&translate(&f, [dx, dy, 0]), t).unwrap();
        let b = translate(&heat_semigroup(&f, t).unwrap(), [dx, dy, 0]);
        prop_assert!(a.max_abs_diff(&b) <= 1e-13 * f.max_abs());
    }

    #[test]
    fn norms_follow_joint_translation_of_field_and_balls(seed in 0u64..1000, kx in -8i64..8, ky in -8i64..8) {
        let f = random(seed, 2.0);
        let h = grid().spacing();
        let fam = BallFamily::default_for(&grid());
        let shifted = BallFamily::from_balls(
            fam.balls()
                .iter()
                .map(|b| {
                    let mut c = b.center;
                    c[0] = (c[0] + kx as f64 * h).rem_euclid(1.0);
                    c[1] = (c[1] + ky as f64 * h).rem_euclid(1.0);
                    Ball { center: c, radius: b.radius }
                })
                .collect(),
        )
        .unwrap();
        let g = translate(&f, [kx, ky, 0]);
        prop_assert!(close(morrey_norm(&g, 2, &shifted).unwrap().value, morrey_norm(&f, 2, &fam).unwrap().value, 1e-12));
        prop_assert!(close(
            q_alpha_seminorm(&g, 0.5, &shifted).unwrap().value,
            q_alpha_seminorm(&f, 0.5, &fam).unwrap().value,
            1e-12,
        ));
    }

    #[test]
    fn leray_projection_is_idempotent_and_solenoidal(seed in 0u64..1000) {
        let v = generate_vector(&FieldSpec::RandomDivFree { seed, decay: 2.0 }, &grid()).unwrap();
        let gradish = qspace::VectorField::new(vec![random(seed, 2.0), random(seed + 1, 2.0)]).unwrap();
        let u = v.add(&gradish).unwrap();
        let p = leray_project(&u);
        prop_assert!(leray_project(&p).sub(&p).unwrap().l2_norm() <= 1e-13 * u.l2_norm());
        prop_assert!(divergence(&p).max_abs() <= 1e-10 * u.max_abs());
        prop_assert!(leray_project(&v).sub(&v).unwrap().l2_norm() <= 1e-12 * v.l2_norm());
    }

    #[test]
    fn schur_masses_never_exceed_one(alpha in 0.0f64..0.99, lz in -3.0f64..3.0, lt in -5.0f64..3.0) {
        let (zeta, t) = (10f64.powf(lz), 10f64.powf(lt));
        prop_assert!(schur_row_mass(alpha, zeta, t) <= 1.0 + 1e-9);
        prop_assert!(schur_column_mass(alpha, zeta, t) <= 1.0 + 1e-9);
    }
}
