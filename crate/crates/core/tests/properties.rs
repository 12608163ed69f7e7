use proptest::prelude::*;

use capshape::geometry::{recenter, translate, BoundaryGrid};
use capshape::harmonic::solve_dirichlet_with;
use capshape::identities::pohozaev;
use capshape::search::{distance_to_ball, random_domain, solve_shape, SolveOptions};
use capshape::{SolverOptions, StarDomain};

fn planar_shape() -> impl Strategy<Value = StarDomain> {
    prop::collection::vec(-0.03..0.03f64, 8).prop_map(|p| {
        let mut c = vec![1.0, 0.0, 0.0];
        c.extend(p);
        StarDomain::planar(c).unwrap()
    })
}

fn axisymmetric_shape() -> impl Strategy<Value = StarDomain> {
    prop::collection::vec(-0.04..0.04f64, 4).prop_map(|p| {
        let mut c = vec![1.0, 0.0];
        c.extend(p);
        StarDomain::axisymmetric(c).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shifted_center_keeps_measures(d in planar_shape(), dx in -0.5..0.5f64, dy in -0.5..0.5f64) {
        let s = d.shifted(&[dx, dy]).unwrap();
        prop_assert!((s.volume() - d.volume()).abs() < 1e-13);
        prop_assert!((s.surface_measure() - d.surface_measure()).abs() < 1e-12);
        let m = BoundaryGrid::new(&s, 128).unwrap().minkowski_moments();
        prop_assert!((m.m0 - 2.0 * d.volume()).abs() < 1e-11);
    }

    #[test]
    fn translation_preserves_the_point_set(d in planar_shape(), dx in -0.05..0.05f64, dy in -0.05..0.05f64) {
        let t = translate(&d, &[dx, dy]).unwrap();
        prop_assert!((t.volume() - d.volume()).abs() < 1e-10);
        prop_assert!((t.surface_measure() - d.surface_measure()).abs() < 1e-10);
        prop_assert!(distance_to_ball(&t) >= 0.0);
        prop_assert!((distance_to_ball(&t) - distance_to_ball(&d)).abs() < 1e-9);
    }

    #[test]
    fn recentering_is_idempotent(d in axisymmetric_shape(), dz in -0.05..0.05f64) {
        let a = recenter(&translate(&d, &[0.0, 0.0, dz]).unwrap()).unwrap();
        let b = recenter(&a).unwrap();
        prop_assert!(a.coefficients()[1].abs() < 1e-12);
        for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn pohozaev_is_origin_independent(d in planar_shape(), dx in -0.2..0.2f64, dy in -0.2..0.2f64) {
        let s = d.shifted(&[dx, dy]).unwrap();
        let opts = SolverOptions::default();
        let a = pohozaev(&solve_dirichlet_with(&d, &opts).unwrap(), &d).unwrap();
        let b = pohozaev(&solve_dirichlet_with(&s, &opts).unwrap(), &s).unwrap();
        prop_assert!(a.rel_gap <= 1e-7 && b.rel_gap <= 1e-7);
        prop_assert!((a.lhs - b.lhs).abs() < 1e-8);
    }
}

#[test]
fn solve_is_gauge_invariant() {
    let init = random_domain(2, 3, 0.1).unwrap();
    let moved = translate(&init, &[0.04, -0.03]).unwrap();
    let opts = SolveOptions::default();
    let a = solve_shape(2, 2.0, &init, &opts).unwrap();
    let b = solve_shape(2, 2.0, &moved, &opts).unwrap();
    assert!(a.converged && b.converged);
    assert!(a.distance_to_ball <= 1e-6 && b.distance_to_ball <= 1e-6);
}

#[test]
fn solves_are_deterministic() {
    let init = random_domain(3, 5, 0.15).unwrap();
    let opts = SolveOptions::default();
    let a = solve_shape(3, -0.5, &init, &opts).unwrap();
    let b = solve_shape(3, -0.5, &init, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}
