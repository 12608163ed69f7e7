//! Special functions and quadrature rules shared by the geometry and harmonic modules.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Volume of the unit ball in R^N (ω_2 = π, ω_3 = 4π/3).
pub fn unit_ball_volume(dimension: usize) -> f64 {
    match dimension {
        0 => 1.0,
        1 => 2.0,
        n => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Measure of the unit sphere |∂B₁| = N·ω_N.
pub fn unit_sphere_measure(dimension: usize) -> f64 {
    dimension as f64 * unit_ball_volume(dimension)
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = NonZeroUsize::new(n).expect("Gauss–Legendre rule needs at least one node");
    let rule = GaussLegendre::new(n);
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Values P_0..P_L and derivatives P'_0..P'_L of the Legendre polynomials at `x`.
pub fn legendre_with_derivative(degree: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; degree + 1];
    let mut dp = vec![0.0; degree + 1];
    p[0] = 1.0;
    if degree >= 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for l in 2..=degree {
        let lf = l as f64;
        p[l] = ((2.0 * lf - 1.0) * x * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
        dp[l] = dp[l - 2] + (2.0 * lf - 1.0) * p[l - 1];
    }
    (p, dp)
}

/// Values P_0..P_L at `x`.
pub fn legendre(degree: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; degree + 1];
    p[0] = 1.0;
    if degree >= 1 {
        p[1] = x;
    }
    for l in 2..=degree {
        let lf = l as f64;
        p[l] = ((2.0 * lf - 1.0) * x * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
    }
    p
}

/// Legendre polynomials of cos φ and their first two φ-derivatives.
///
/// Returns `(P, dP/dφ, d²P/dφ²)` using `d²/dφ² P_l(cos φ) = x P'_l(x) - l(l+1) P_l(x)`,
/// which follows from the Legendre equation and stays regular at the poles.
pub fn legendre_polar(degree: usize, x: f64, sin_phi: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (p, dp) = legendre_with_derivative(degree, x);
    let d1 = dp.iter().map(|d| -sin_phi * d).collect();
    let d2 = (0..=degree)
        .map(|l| x * dp[l] - (l * (l + 1)) as f64 * p[l])
        .collect();
    (p, d1, d2)
}

/// Complete elliptic integrals K(m) and E(m) (parameter convention, m = k²) by the
/// arithmetic–geometric mean.
pub fn elliptic_ke(m: f64) -> (f64, f64) {
    debug_assert!(
        (0.0..1.0).contains(&m),
        "elliptic parameter {m} outside [0, 1)"
    );
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut c = m.sqrt();
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..40 {
        if c.abs() <= 1e-17 * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        a = an;
        b = bn;
    }
    let k = PI / (2.0 * a);
    (k, k * (1.0 - sum))
}

/// Equispaced angles 2π(j + offset)/n, j = 0..n.
pub fn uniform_angles(n: usize, offset: f64) -> Vec<f64> {
    (0..n)
        .map(|j| 2.0 * PI * (j as f64 + offset) / n as f64)
        .collect()
}
