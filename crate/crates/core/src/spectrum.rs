//! Linearization of the overdetermined condition at the ball: closed-form bifurcation values,
//! planar eigenvalues and their finite-difference counterparts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, StarDomain};
use crate::harmonic::{solve_dirichlet_with, SolverOptions};
use crate::overdet::residual;
use crate::special::legendre;

/// Γ at which the mode-ℓ eigenvalue of the linearized condition at the unit ball vanishes.
pub fn bifurcation_value(dimension: usize, mode: usize) -> Result<f64> {
    let (p, q) = bifurcation_fraction(dimension, mode)?;
    Ok(p as f64 / q as f64)
}

/// `bifurcation_value` as a reduced fraction `(numerator, denominator)`.
pub fn bifurcation_fraction(dimension: usize, mode: usize) -> Result<(u64, u64)> {
    if dimension < 2 {
        return Err(Error::UnsupportedDimension {
            dimension,
            operation: "bifurcation values",
        });
    }
    if mode == 1 {
        return Err(Error::TranslationMode);
    }
    let n = dimension as u64;
    let l = mode as u64;
    let (p, q) = match (dimension, mode) {
        (2, _) => (1, l + 1),
        (_, 0) => (n - 2, 1),
        (3, _) => (2, l + 2),
        _ => ((n - 1) * (n - 2), l + n - 1),
    };
    let g = gcd(p, q);
    Ok((p / g, q / g))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// μ_ℓ(Γ) = (1-ℓ)(1-Γ(ℓ+1)), the planar linearized eigenvalue on cos ℓθ.
pub fn planar_mode_eigenvalue(gamma: f64, mode: usize) -> f64 {
    let l = mode as f64;
    (1.0 - l) * (1.0 - gamma * (l + 1.0))
}

/// Closed form of the axisymmetric eigenvalue on P_ℓ (N = 3): (ℓ-1)(Γ(ℓ+2)/2 - 1).
pub fn axisymmetric_mode_eigenvalue(gamma: f64, mode: usize) -> f64 {
    let l = mode as f64;
    (l - 1.0) * (0.5 * gamma * (l + 2.0) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeEigenvalue {
    pub dimension: usize,
    pub mode: usize,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    /// μ_ℓ(Γ) in the plane; absent in higher dimension.
    pub analytic_value: Option<f64>,
    /// Zero of the eigenvalue in Γ (absent for the translation mode).
    pub bifurcation_value: Option<f64>,
    pub numeric_value: f64,
    pub fd_step: f64,
}

const SPECTRUM_NODES: usize = 64;

fn spectrum_solver() -> SolverOptions {
    SolverOptions {
        truncation: 24,
        ..SolverOptions::default()
    }
}

fn mode_domain(dimension: usize, mode: usize, amplitude: f64) -> Result<StarDomain> {
    match dimension {
        2 => {
            let mut c = vec![0.0; 2 * mode.max(1) + 1];
            c[0] = 1.0;
            c[if mode == 0 { 0 } else { 2 * mode - 1 }] += amplitude;
            StarDomain::planar(c)
        }
        3 => {
            let mut c = vec![0.0; mode.max(1) + 1];
            c[0] = 1.0;
            c[mode] += amplitude;
            StarDomain::axisymmetric(c)
        }
        _ => Err(Error::UnsupportedDimension {
            dimension,
            operation: "numeric linearization",
        }),
    }
}

/// Coefficients of the residual on the basis functions cos ℓθ / P_ℓ(cos φ) for the listed
/// modes, with the flux and curvature parts kept apart so that Γ enters linearly:
/// `projection(Γ) = a + Γ b`.
fn residual_projections(domain: &StarDomain, modes: &[usize]) -> Result<Vec<(f64, f64)>> {
    let top = modes.iter().copied().max().unwrap_or(0);
    let nodes = SPECTRUM_NODES.max(4 * top + 8);
    let e = solve_dirichlet_with(domain, &spectrum_solver())?;
    let g = BoundaryGrid::new(domain, nodes)?;
    let r0 = residual(domain, &e, &g, 0.0)?.values;
    let r1 = residual(domain, &e, &g, 1.0)?.values;
    let project = |f: &[f64], l: usize| -> f64 {
        if domain.dimension() == 2 {
            let s: f64 = g
                .nodes
                .iter()
                .zip(f)
                .zip(&g.parameter_weights)
                .map(|((t, v), w)| w * v * (l as f64 * t).cos())
                .sum();
            if l == 0 {
                s / (2.0 * PI)
            } else {
                s / PI
            }
        } else {
            let s: f64 = g
                .nodes
                .iter()
                .zip(f)
                .zip(&g.parameter_weights)
                .map(|((phi, v), w)| w * v * legendre(l, phi.cos())[l])
                .sum();
            0.5 * (2 * l + 1) as f64 * s
        }
    };
    Ok(modes
        .iter()
        .map(|&l| {
            let a = project(&r0, l);
            (a, project(&r1, l) - a)
        })
        .collect())
}

/// Richardson-extrapolated central-difference derivative of the mode-ℓ residual coefficient along R = 1 + t·basis,
/// returned as `(a, b)` with eigenvalue `a + Γ b`.
fn linearization(dimension: usize, mode: usize, step: f64) -> Result<(f64, f64)> {
    if !(1e-6..=1e-3).contains(&step) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must lie in [1e-6, 1e-3], got {step}"
        )));
    }
    let central = |h: f64| -> Result<(f64, f64)> {
        let plus = residual_projections(&mode_domain(dimension, mode, h)?, &[mode])?[0];
        let minus = residual_projections(&mode_domain(dimension, mode, -h)?, &[mode])?[0];
        Ok((
            (plus.0 - minus.0) / (2.0 * h),
            (plus.1 - minus.1) / (2.0 * h),
        ))
    };
    let coarse = central(step)?;
    let fine = central(0.5 * step)?;
    Ok((
        (4.0 * fine.0 - coarse.0) / 3.0,
        (4.0 * fine.1 - coarse.1) / 3.0,
    ))
}

/// Finite-difference eigenvalue of the linearized condition on the mode-ℓ basis function.
///
/// The unit ball is perturbed to R = 1 ± step·basis; the residual is projected on the basis
/// and differenced. The sign is that of the residual itself, which reproduces μ_ℓ(Γ) in the
/// plane.
pub fn numeric_mode_eigenvalue(
    dimension: usize,
    gamma: f64,
    mode: usize,
    step: f64,
) -> Result<ModeEigenvalue> {
    let (a, b) = linearization(dimension, mode, step)?;
    Ok(ModeEigenvalue {
        dimension,
        mode,
        gamma,
        analytic_value: (dimension == 2).then(|| planar_mode_eigenvalue(gamma, mode)),
        bifurcation_value: bifurcation_value(dimension, mode).ok(),
        numeric_value: a + gamma * b,
        fd_step: step,
    })
}

/// Zero in Γ of the numeric mode-ℓ eigenvalue. The eigenvalue is affine in Γ, so one
/// linearization gives the root exactly.
pub fn numeric_bifurcation_value(dimension: usize, mode: usize, step: f64) -> Result<f64> {
    if mode == 1 {
        return Err(Error::TranslationMode);
    }
    let (a, b) = linearization(dimension, mode, step)?;
    if b.abs() < 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "mode {mode} eigenvalue does not depend on Γ"
        )));
    }
    Ok(-a / b)
}

/// Second-order coefficients of the planar ℓ-fold branch R = 1 + ε cos ℓθ + ε²(a₀ + a₂ cos 2ℓθ)
/// at Γ = 1/(ℓ+1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrder {
    pub mode: usize,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    /// a₀ forced by the overdetermined condition, from the numerics.
    pub a0_numeric: f64,
    /// -ℓ²/4.
    pub a0_closed_form: f64,
    /// -1/4, the value that keeps the area fixed.
    pub a0_area: f64,
    pub a2_numeric: f64,
    /// Ratio of successive differences of c(ε)/ε² under halving of ε (≈ 4 when quadratic).
    pub richardson_ratio: f64,
}

const SECOND_ORDER_STEPS: [f64; 3] = [0.04, 0.02, 0.01];

/// Second-order branch coefficients by Richardson extrapolation of the constant and 2ℓ-th
/// residual modes along R = 1 + ε cos ℓθ.
pub fn branch_second_order(mode: usize) -> Result<SecondOrder> {
    if mode < 2 {
        return Err(Error::InvalidArgument(format!(
            "second-order branch coefficients need l >= 2, got {mode}"
        )));
    }
    let gamma = bifurcation_value(2, mode)?;
    let modes = [0, 2 * mode];
    let mut q = Vec::with_capacity(SECOND_ORDER_STEPS.len());
    for &eps in &SECOND_ORDER_STEPS {
        let p = residual_projections(&mode_domain(2, mode, eps)?, &modes)?;
        q.push(
            p.iter()
                .map(|(a, b)| (a + gamma * b) / (eps * eps))
                .collect::<Vec<_>>(),
        );
    }
    let extrapolate = |k: usize| -> Result<(f64, f64)> {
        let d1 = q[0][k] - q[1][k];
        let d2 = q[1][k] - q[2][k];
        let scale = q[2][k].abs().max(1.0);
        let ratio = if d2.abs() <= 1e-9 * scale {
            4.0
        } else {
            d1 / d2
        };
        if d1.abs() > 1e-9 * scale && !(3.0..=5.0).contains(&ratio) {
            return Err(Error::Extrapolation(format!(
                "mode {} coefficient scales with ratio {ratio:.3}, expected 4",
                modes[k]
            )));
        }
        Ok(((4.0 * q[2][k] - q[1][k]) / 3.0, ratio))
    };
    let (q0, ratio) = extrapolate(0)?;
    let (q2, _) = extrapolate(1)?;
    let mu0 = numeric_mode_eigenvalue(2, gamma, 0, 1e-4)?.numeric_value;
    let mu2 = numeric_mode_eigenvalue(2, gamma, 2 * mode, 1e-4)?.numeric_value;
    let l = mode as f64;
    Ok(SecondOrder {
        mode,
        gamma,
        a0_numeric: -q0 / mu0,
        a0_closed_form: -l * l / 4.0,
        a0_area: -0.25,
        a2_numeric: -q2 / mu2,
        richardson_ratio: ratio,
    })
}
