use std::f64::consts::PI;

use super::ExteriorExpansion;
use crate::error::{Error, Result};
use crate::geometry::StarDomain;
use crate::special::gauss_legendre;

const SHELL_FACTOR: f64 = 1.05;

/// ∫ |∇u|² over the exterior of Ω (N = 3).
///
/// Beyond ρ₀ = 1.05·max R the energy is summed from the multipole coefficients; the shell
/// between Σ and ρ₀ is integrated with Gauss–Legendre rules in r and cos φ.
pub fn dirichlet_energy(expansion: &ExteriorExpansion, domain: &StarDomain) -> Result<f64> {
    if domain.dimension() != 3 || expansion.dimension != 3 {
        return Err(Error::UnsupportedDimension {
            dimension: domain.dimension(),
            operation: "Dirichlet energy (diverges logarithmically in the plane)",
        });
    }
    let rho0 = SHELL_FACTOR * domain.max_radius();

    // ∫_{r>ρ₀} |∇(D r^{-(l+1)} P_l)|² = 4π (l+1)/(2l+1) D² ρ₀^{-(2l+1)}, modes orthogonal.
    let ratio = expansion.source_radius() / rho0;
    let degree = if ratio > 0.0 {
        ((-36.0 / ratio.log10()).ceil() as usize).clamp(expansion.decay.len(), 2000)
    } else {
        expansion.decay.len().max(1) - 1
    };
    let d = expansion.merged_multipoles(degree);
    let tail: f64 = d
        .iter()
        .enumerate()
        .map(|(l, c)| {
            let scaled = c / rho0.powi(l as i32 + 1);
            4.0 * PI * (l + 1) as f64 / (2 * l + 1) as f64 * rho0 * scaled * scaled
        })
        .sum();

    let n_ang = 2 * (domain.degree() + 1).max(32) + 2 * expansion.sources.len().min(512);
    let n_rad = 48;
    let (xs, wx) = gauss_legendre(n_ang);
    let (ts, wt) = gauss_legendre(n_rad);
    let zc = domain.center()[2];
    let mut shell = 0.0;
    for (&x, &w_ang) in xs.iter().zip(&wx) {
        let s = (1.0 - x * x).sqrt();
        let r_in = domain.radial(x.acos()).r;
        let half = 0.5 * (rho0 - r_in);
        let mut line = 0.0;
        for (&t, &w_rad) in ts.iter().zip(&wt) {
            let r = r_in + half * (t + 1.0);
            let g = expansion.gradient(&[r * s, 0.0, zc + r * x]);
            line += w_rad * r * r * (g[0] * g[0] + g[2] * g[2]);
        }
        shell += w_ang * half * line;
    }
    Ok(tail + 2.0 * PI * shell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryGrid;
    use crate::harmonic::{neumann_trace, solve_dirichlet};

    #[test]
    fn unit_sphere_energy() {
        let d = StarDomain::unit_ball(3);
        let e = solve_dirichlet(&d, 8, 32).unwrap();
        assert!((dirichlet_energy(&e, &d).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn radius_two_sphere_energy() {
        let d = StarDomain::ball(3, 2.0).unwrap();
        let e = solve_dirichlet(&d, 8, 32).unwrap();
        let en = dirichlet_energy(&e, &d).unwrap();
        assert!((en - 8.0 * PI).abs() < 1e-11);
        let g = BoundaryGrid::new(&d, 32).unwrap();
        let flux = g.integrate(&neumann_trace(&e, &g).unwrap());
        assert!((en + flux).abs() < 1e-11);
    }

    #[test]
    fn planar_energy_is_unsupported() {
        let d = StarDomain::unit_ball(2);
        let e = solve_dirichlet(&d, 8, 64).unwrap();
        assert!(matches!(
            dirichlet_energy(&e, &d),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn perturbed_energy_equals_flux() {
        let d = StarDomain::axisymmetric(vec![1.0, 0.0, 0.1]).unwrap();
        let e = solve_dirichlet(&d, 24, 0).unwrap();
        let g = BoundaryGrid::new(&d, 128).unwrap();
        let flux = g.integrate(&neumann_trace(&e, &g).unwrap());
        let en = dirichlet_energy(&e, &d).unwrap();
        assert!(((en + flux) / en).abs() < 1e-7, "{en} {flux}");
    }
}
