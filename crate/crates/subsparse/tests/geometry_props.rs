//! Geometry fixtures with known closed-form answers, bracket containment
//! against an independent planar oracle, and property-based invariants.

mod common;

use common::inradius_grid_oracle_d2;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use subsparse::{
    gen_points, gen_subspaces, incoherence, inradius, orthonormalize, principal_angles,
    GridOptions, MethodSpec, Subspace,
};

fn plane_in(ambient: usize) -> Subspace {
    let mut basis = DMatrix::zeros(ambient, 2);
    basis[(0, 0)] = 1.0;
    basis[(1, 1)] = 1.0;
    Subspace::from_orthonormal(basis).unwrap()
}

/// Unit points at the given plane angles, embedded in the subspace.
fn planar_points(s: &Subspace, angles_deg: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(s.ambient_dim(), angles_deg.len());
    for (j, a) in angles_deg.iter().enumerate() {
        let t = a.to_radians();
        let p = s.embed(&DVector::from_column_slice(&[t.cos(), t.sin()]));
        m.set_column(j, &p);
    }
    m
}

#[test]
fn cross_polytope_inradius_is_inverse_sqrt_two() {
    let s = plane_in(2);
    let points = planar_points(&s, &[0.0, 90.0]);
    let bracket = inradius(&s, &points, &MethodSpec::Exact).unwrap();
    let expected = 1.0 / 2.0f64.sqrt();
    assert!(bracket.is_exact);
    assert!(
        (bracket.upper - expected).abs() <= 1e-9,
        "got {:.12}, want {expected:.12}",
        bracket.upper
    );
}

#[test]
fn hexagon_inradius_is_sqrt_three_over_two() {
    // Three unit points 60 degrees apart symmetrize to a regular hexagon.
    let s = plane_in(4);
    let points = planar_points(&s, &[0.0, 60.0, 120.0]);
    let bracket = inradius(&s, &points, &MethodSpec::Auto).unwrap();
    let expected = 3.0f64.sqrt() / 2.0;
    assert!(
        (bracket.upper - expected).abs() <= 1e-6,
        "got {:.12}, want {expected:.12}",
        bracket.upper
    );
    // The independent oracle lands on the same value.
    let oracle = inradius_grid_oracle_d2(&s, &points);
    assert!((oracle - expected).abs() <= 1e-9);
}

#[test]
fn orthogonal_planes_have_zero_incoherence() {
    let s = plane_in(4);
    let mut other = DMatrix::zeros(4, 2);
    other[(2, 0)] = 1.0;
    other[(3, 1)] = 1.0;
    let foreign = Subspace::from_orthonormal(other).unwrap();
    let points = planar_points(&foreign, &[15.0, 75.0]);
    let mu = incoherence(&s, &points).unwrap();
    assert!(mu.abs() <= 1e-12, "got {mu:.3e}");
}

#[test]
fn brackets_contain_the_planar_oracle_on_random_instances() {
    for case in 0..100u64 {
        let ambient = 3 + (case % 6) as usize;
        let s = gen_subspaces(ambient, &[2], 7_000 + case, None)
            .unwrap()
            .remove(0);
        let count = 3 + (case % 9) as usize;
        let points = gen_points(&s, count, 8_000 + case).unwrap();
        let oracle = inradius_grid_oracle_d2(&s, &points);

        for method in [
            MethodSpec::Exact,
            MethodSpec::Grid(GridOptions::default()),
            MethodSpec::LpBox,
        ] {
            let b = inradius(&s, &points, &method).unwrap();
            assert!(
                b.lower <= oracle + 1e-6 && oracle <= b.upper + 1e-6,
                "case {case} ({method:?}): oracle {oracle:.9} outside [{:.9}, {:.9}]",
                b.lower,
                b.upper
            );
            assert!(b.lower <= b.upper + 1e-12);
        }
        // The exact method must actually agree with the oracle, not just
        // bracket it.
        let exact = inradius(&s, &points, &MethodSpec::Exact).unwrap();
        assert!(
            (exact.upper - oracle).abs() <= 1e-6,
            "case {case}: exact {:.9} vs oracle {oracle:.9}",
            exact.upper
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent_and_contractive(
        seed in 0u64..1_000_000,
        ambient in 3usize..10,
        dim in 1usize..3,
    ) {
        let dim = dim.min(ambient - 1);
        let s = gen_subspaces(ambient, &[dim], seed, None).unwrap().remove(0);
        let v = common::random_vector(ambient, seed ^ 0xABCD);
        let pv = s.project(&v).unwrap();
        let ppv = s.project(&pv).unwrap();
        prop_assert!((&ppv - &pv).norm() <= 1e-10 * (1.0 + pv.norm()));
        prop_assert!(pv.norm() <= v.norm() * (1.0 + 1e-12));
        // Embedding coordinates round-trips for in-subspace vectors.
        let back = s.embed(&s.coords(&pv));
        prop_assert!((&back - &pv).norm() <= 1e-10 * (1.0 + pv.norm()));
    }

    #[test]
    fn incoherence_is_rotation_invariant(
        seed in 0u64..1_000_000,
    ) {
        let ambient = 6;
        let subs = gen_subspaces(ambient, &[2, 2], seed, None).unwrap();
        let points = gen_points(&subs[1], 10, seed ^ 0x5151).unwrap();
        let mu = incoherence(&subs[0], &points).unwrap();

        // A random rotation from the orthonormalized frame of a random
        // square matrix; applying it to both the subspace and the points
        // must not change the incoherence.
        let q = orthonormalize(&common::random_matrix(ambient, ambient, seed ^ 0x9999))
            .unwrap()
            .basis()
            .clone();
        let rotated_basis = &q * subs[0].basis();
        let rotated = Subspace::from_orthonormal(rotated_basis).unwrap();
        let rotated_points = &q * &points;
        let mu_rot = incoherence(&rotated, &rotated_points).unwrap();
        prop_assert!((mu - mu_rot).abs() <= 1e-9, "mu {mu} vs rotated {mu_rot}");
    }

    #[test]
    fn incoherence_is_bounded_by_smallest_principal_angle(
        seed in 0u64..1_000_000,
    ) {
        let subs = gen_subspaces(8, &[2, 3], seed, None).unwrap();
        let points = gen_points(&subs[1], 12, seed ^ 0x7777).unwrap();
        let mu = incoherence(&subs[0], &points).unwrap();
        // Unit points of the other subspace project onto ours with norm at
        // most cos of the smallest principal angle.
        let angles = principal_angles(&subs[0], &subs[1]).unwrap();
        let max_cos = angles.iter().map(|t| t.cos()).fold(0.0f64, f64::max);
        prop_assert!(mu <= max_cos + 1e-9, "mu {mu} vs max cos {max_cos}");
        prop_assert!((0.0..=1.0 + 1e-12).contains(&mu));
    }

    #[test]
    fn principal_angles_are_sorted_in_range(
        seed in 0u64..1_000_000,
        d1 in 1usize..4,
        d2 in 1usize..4,
    ) {
        let subs = gen_subspaces(9, &[d1, d2], seed, None).unwrap();
        let angles = principal_angles(&subs[0], &subs[1]).unwrap();
        prop_assert_eq!(angles.len(), d1.min(d2));
        for w in angles.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12);
        }
        for t in &angles {
            prop_assert!((-1e-12..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(t));
        }
    }
}
