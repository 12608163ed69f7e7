//! Values checked against independent brute-force computations.

use std::f64::consts::PI;

use capshape::geometry::BoundaryGrid;
use capshape::harmonic::solve_dirichlet_with;
use capshape::identities::energy_identity;
use capshape::overdet::solve_residual;
use capshape::search::{random_domain, rigidity_sweep, SolveOptions};
use capshape::{SolverOptions, StarDomain};

fn planar_point(r: impl Fn(f64) -> f64, t: f64) -> (f64, f64) {
    let v = r(t);
    (v * t.cos(), v * t.sin())
}

#[test]
fn arc_length_by_dense_polyline() {
    let d = StarDomain::planar(vec![1.0, 0.0, 0.0, 0.1, 0.0]).unwrap();
    let r = |t: f64| 1.0 + 0.1 * (2.0 * t).cos();
    let polyline = |n: usize| -> f64 {
        let h = 2.0 * PI / n as f64;
        (0..n)
            .map(|i| {
                let (x0, y0) = planar_point(r, i as f64 * h);
                let (x1, y1) = planar_point(r, (i + 1) as f64 * h);
                (x1 - x0).hypot(y1 - y0)
            })
            .sum()
    };
    // Chords fall short by O(h²); one Richardson step removes it.
    let oracle = (4.0 * polyline(200_000) - polyline(100_000)) / 3.0;
    let g = BoundaryGrid::new(&d, 256).unwrap();
    assert!(
        (g.total_weight() - oracle).abs() < 1e-10,
        "{} {oracle}",
        g.total_weight()
    );
    assert!((d.surface_measure() - oracle).abs() < 1e-10);
}

#[test]
fn area_by_polar_quadrature() {
    let d = StarDomain::planar(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.0]).unwrap();
    let n = 100_000;
    let h = 2.0 * PI / n as f64;
    let oracle: f64 = (0..n)
        .map(|i| 0.5 * (1.0 + 0.2 * (3.0 * (i as f64 + 0.5) * h).cos()).powi(2) * h)
        .sum();
    assert!((d.volume() - oracle).abs() < 1e-10);
}

#[test]
fn surface_of_revolution_by_frusta() {
    let d = StarDomain::axisymmetric(vec![1.0, 0.0, 0.1]).unwrap();
    let r = |phi: f64| {
        let x = phi.cos();
        1.0 + 0.05 * (3.0 * x * x - 1.0)
    };
    let frusta = |n: usize| -> f64 {
        let h = PI / n as f64;
        (0..n)
            .map(|i| {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                let (rho0, z0) = (r(a) * a.sin(), r(a) * a.cos());
                let (rho1, z1) = (r(b) * b.sin(), r(b) * b.cos());
                PI * (rho0 + rho1) * (rho1 - rho0).hypot(z1 - z0)
            })
            .sum()
    };
    let oracle = (4.0 * frusta(200_000) - frusta(100_000)) / 3.0;
    assert!(
        (d.surface_measure() - oracle).abs() < 1e-10,
        "{} {oracle}",
        d.surface_measure()
    );
}

#[test]
fn support_moment_is_three_volumes() {
    let d = StarDomain::axisymmetric(vec![1.0, 0.0, 0.1]).unwrap();
    let m = BoundaryGrid::new(&d, 96).unwrap().minkowski_moments();
    assert!((m.m0 - 3.0 * d.volume()).abs() < 1e-9);
}

#[test]
fn residual_by_independent_recomputation() {
    let d = StarDomain::planar(vec![1.0, 0.0, 0.0, 0.1, 0.0]).unwrap();
    let gamma = 1.0 / 3.0;
    let (e, _, res) = solve_residual(&d, gamma, &SolverOptions::default(), 256).unwrap();

    // Normal derivative by central differences of the potential, curvature from the closed
    // form of the graph, and the L² norm by a dense midpoint rule in arc length.
    let n = 20_000;
    let h = 2.0 * PI / n as f64;
    let fd = 1e-5;
    let mut sq = 0.0;
    for i in 0..n {
        let t = (i as f64 + 0.5) * h;
        let (s, c) = t.sin_cos();
        let r = 1.0 + 0.1 * (2.0 * t).cos();
        let dr = -0.2 * (2.0 * t).sin();
        let ddr = -0.4 * (2.0 * t).cos();
        let w = r.hypot(dr);
        let nu = [(r * c + dr * s) / w, (r * s - dr * c) / w];
        let p = [r * c, r * s];
        let up = e.value(&[p[0] + fd * nu[0], p[1] + fd * nu[1], 0.0]);
        let um = e.value(&[p[0] - fd * nu[0], p[1] - fd * nu[1], 0.0]);
        let dn = (up - um) / (2.0 * fd);
        let kappa = (r * r + 2.0 * dr * dr - r * ddr) / w.powi(3);
        let q = dn + gamma * kappa - (gamma - 1.0);
        sq += q * q * w * h;
    }
    let oracle = sq.sqrt();
    assert!(oracle > 1e-3);
    assert!(
        (res.l2_norm - oracle).abs() < 1e-9,
        "{} {oracle}",
        res.l2_norm
    );
}

#[test]
fn energy_on_random_axisymmetric_domain() {
    let d = random_domain(3, 11, 0.1).unwrap();
    let e = solve_dirichlet_with(&d, &SolverOptions::default()).unwrap();
    let r = energy_identity(&e, &d).unwrap();
    assert!(r.rel_gap <= 1e-7, "{r:?}");
}

#[test]
fn sweep_at_first_axisymmetric_bifurcation_records_every_row() {
    let opts = SolveOptions::default();
    let rows = rigidity_sweep(3, &[0.5], 3, &opts).unwrap();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let rep = row.report.as_ref().expect("solve ran");
        if rep.converged {
            assert!(rep.residual_norm <= opts.residual_tolerance);
        }
    }
}
