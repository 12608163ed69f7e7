//! Source kernels in frame coordinates.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::special::elliptic_ke;

/// log|p - y| - log|p|: harmonic away from y and 0, O(1/|p|) at infinity, zero net flux
/// through any curve enclosing both singularities.
pub(crate) fn log_value(p: [f64; 2], y: [f64; 2]) -> f64 {
    let d2 = (p[0] - y[0]).powi(2) + (p[1] - y[1]).powi(2);
    let r2 = p[0] * p[0] + p[1] * p[1];
    0.5 * (d2 / r2).ln()
}

pub(crate) fn log_gradient(p: [f64; 2], y: [f64; 2]) -> [f64; 2] {
    let (dx, dy) = (p[0] - y[0], p[1] - y[1]);
    let d2 = dx * dx + dy * dy;
    let r2 = p[0] * p[0] + p[1] * p[1];
    [dx / d2 - p[0] / r2, dy / d2 - p[1] / r2]
}

/// Mean of 1/|x - y| over the coaxial ring of radius `a` at height `b`:
/// (2/π) K(m) / D with D² = (ρ + a)² + (z - b)², m = 4aρ/D².
pub(crate) fn ring_value(p: [f64; 2], ring: [f64; 2]) -> f64 {
    let (rho, z) = (p[0], p[1]);
    let (a, b) = (ring[0].abs(), ring[1]);
    let d2 = (rho + a).powi(2) + (z - b).powi(2);
    let m = 4.0 * a * rho / d2;
    let (k, _) = elliptic_ke(m);
    FRAC_2_PI * k / d2.sqrt()
}

/// (∂ρ, ∂z) of [`ring_value`]. Written through dK/dm so the axis needs no special case.
pub(crate) fn ring_gradient(p: [f64; 2], ring: [f64; 2]) -> [f64; 2] {
    let (rho, z) = (p[0], p[1]);
    let (a, b) = (ring[0].abs(), ring[1]);
    let dz = z - b;
    let d2 = (rho + a).powi(2) + dz * dz;
    let d = d2.sqrt();
    let m = 4.0 * a * rho / d2;
    let (k, dk) = k_and_derivative(m);
    let dm_drho = 4.0 * a / d2 * (1.0 - 2.0 * rho * (rho + a) / d2);
    let dm_dz = -2.0 * m * dz / d2;
    [
        FRAC_2_PI * (dk * dm_drho / d - k * (rho + a) / (d2 * d)),
        FRAC_2_PI * (dk * dm_dz / d - k * dz / (d2 * d)),
    ]
}

/// K(m) and dK/dm.
fn k_and_derivative(m: f64) -> (f64, f64) {
    if m < 0.05 {
        // K = (π/2) Σ t_n mⁿ with t_n = ((2n-1)!!/(2n)!!)².
        let mut t = 1.0;
        let mut k = 1.0;
        let mut dk = 0.0;
        let mut mp = 1.0;
        for n in 1..30 {
            let q = (2 * n - 1) as f64 / (2 * n) as f64;
            t *= q * q;
            dk += n as f64 * t * mp;
            mp *= m;
            k += t * mp;
        }
        (0.5 * PI * k, 0.5 * PI * dk)
    } else {
        let (k, e) = elliptic_ke(m);
        (k, (e - (1.0 - m) * k) / (2.0 * m * (1.0 - m)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_is_the_mean_of_point_potentials() {
        let (p, ring) = ([0.7, 0.3], [0.4, -0.2]);
        let n = 4000;
        let mean: f64 = (0..n)
            .map(|j| {
                let psi = 2.0 * PI * j as f64 / n as f64;
                let d2 = p[0] * p[0] + ring[0] * ring[0] - 2.0 * p[0] * ring[0] * psi.cos()
                    + (p[1] - ring[1]).powi(2);
                1.0 / d2.sqrt()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - ring_value(p, ring)).abs() < 1e-13);
    }

    #[test]
    fn ring_gradient_matches_closed_forms() {
        let h = 1e-6;
        for (p, ring) in [
            ([0.7, 0.3], [0.4, -0.2]),
            ([0.01, 1.1], [0.5, 0.2]),
            ([1.3, 0.0], [0.05, 0.9]),
        ] {
            let g = ring_gradient(p, ring);
            let fr = (ring_value([p[0] + h, p[1]], ring) - ring_value([p[0] - h, p[1]], ring))
                / (2.0 * h);
            let fz = (ring_value([p[0], p[1] + h], ring) - ring_value([p[0], p[1] - h], ring))
                / (2.0 * h);
            assert!((g[0] - fr).abs() < 1e-8 && (g[1] - fz).abs() < 1e-8);
        }
        // ∂z G = -(2/π)(z - b) E / (D d²)
        let (p, ring): ([f64; 2], [f64; 2]) = ([0.7, 0.3], [0.4, -0.2]);
        let d2 = (p[0] + ring[0]).powi(2) + (p[1] - ring[1]).powi(2);
        let dd2 = (p[0] - ring[0]).powi(2) + (p[1] - ring[1]).powi(2);
        let (_, e) = elliptic_ke(4.0 * p[0] * ring[0] / d2);
        let gz = -FRAC_2_PI * (p[1] - ring[1]) * e / (d2.sqrt() * dd2);
        assert!((ring_gradient(p, ring)[1] - gz).abs() < 1e-14);
    }

    #[test]
    fn ring_on_axis_has_no_radial_field() {
        assert!(ring_gradient([0.0, 1.2], [0.3, 0.1])[0].abs() < 1e-15);
    }

    #[test]
    fn degenerate_ring_is_a_point_charge() {
        let v = ring_value([0.6, 0.8], [0.0, 0.0]);
        assert!((v - 1.0).abs() < 1e-15);
        let g = ring_gradient([0.6, 0.8], [0.0, 0.0]);
        assert!((g[0] + 0.6).abs() < 1e-14 && (g[1] + 0.8).abs() < 1e-14);
    }

    #[test]
    fn small_m_series_agrees_with_agm() {
        for m in [0.01, 0.049] {
            let (k, dk) = k_and_derivative(m);
            let (ka, ea) = elliptic_ke(m);
            assert!((k - ka).abs() < 1e-14);
            let da = (ea - (1.0 - m) * ka) / (2.0 * m * (1.0 - m));
            assert!((dk - da).abs() < 1e-11);
        }
    }
}
