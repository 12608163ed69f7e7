use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, LmSettings};
use crate::error::{Error, Result};
use crate::geometry::{recenter, BoundaryGrid, StarDomain};
use crate::harmonic::{solve_dirichlet_with, SolverOptions};
use crate::overdet::residual;
use crate::special::unit_ball_volume;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Bound on the stacked residual norm; at least 1e-12.
    pub residual_tolerance: f64,
    /// Bound on the undamped Gauss–Newton step at convergence.
    pub step_tolerance: f64,
    /// Fraction of each Levenberg–Marquardt step taken, in (0, 1].
    pub step_damping: f64,
    pub volume_weight: f64,
    pub truncation: usize,
    pub collocation_count: usize,
    pub seed: u64,
    /// Highest mode carried by the shape unknowns (raised to the initial degree if needed).
    pub shape_modes: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 60,
            residual_tolerance: 1e-9,
            step_tolerance: 1e-7,
            step_damping: 1.0,
            volume_weight: 10.0,
            truncation: 24,
            collocation_count: 0,
            seed: 0,
            shape_modes: 8,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tolerance >= 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "residual_tolerance must be at least 1e-12, got {}",
                self.residual_tolerance
            )));
        }
        if !(self.step_damping > 0.0 && self.step_damping <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "step_damping must lie in (0, 1], got {}",
                self.step_damping
            )));
        }
        if !(self.volume_weight > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "volume_weight must be positive, got {}",
                self.volume_weight
            )));
        }
        if !(self.step_tolerance > 0.0) {
            return Err(Error::InvalidArgument(
                "step_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            truncation: self.truncation,
            collocation_count: self.collocation_count,
            ..SolverOptions::default()
        }
    }

    pub(crate) fn lm(&self) -> LmSettings {
        LmSettings {
            max_iterations: self.max_iterations,
            residual_tolerance: self.residual_tolerance,
            step_tolerance: self.step_tolerance,
            step_scale: self.step_damping,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub final_domain: StarDomain,
    pub residual_norm: f64,
    pub volume_gap: f64,
    pub distance_to_ball: f64,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// L² distance over the parameter sphere between R and 1 after recentering and rescaling to
/// the unit-ball volume.
pub fn distance_to_ball(domain: &StarDomain) -> f64 {
    let d = recenter(domain)
        .and_then(|d| d.with_unit_volume())
        .unwrap_or_else(|_| domain.clone());
    let c = d.coefficients();
    let sq = if d.dimension() == 2 {
        2.0 * PI * (c[0] - 1.0).powi(2) + PI * c[1..].iter().map(|v| v * v).sum::<f64>()
    } else {
        c.iter()
            .enumerate()
            .map(|(l, v)| {
                let dv = v - if l == 0 { 1.0 } else { 0.0 };
                4.0 * PI / (2 * l + 1) as f64 * dv * dv
            })
            .sum()
    };
    sq.sqrt()
}

/// Node count of the residual grid for shapes of the given degree.
pub(crate) fn residual_nodes(dimension: usize, degree: usize) -> usize {
    if dimension == 2 {
        64.max(8 * (degree + 1))
    } else {
        48.max(6 * (degree + 1))
    }
}

/// Surface-weighted residual samples √w·(∂_ν u - Γ𝓗 - λ), or `None` for an inadmissible shape.
pub(crate) fn weighted_residual(
    domain: &StarDomain,
    gamma: f64,
    solver: &SolverOptions,
    nodes: usize,
) -> Option<(Vec<f64>, BoundaryGrid)> {
    let e = solve_dirichlet_with(domain, solver).ok()?;
    let g = BoundaryGrid::new(domain, nodes).ok()?;
    let r = residual(domain, &e, &g, gamma).ok()?;
    let v = r
        .values
        .iter()
        .zip(&g.weights)
        .map(|(v, w)| v * w.sqrt())
        .collect();
    Some((v, g))
}

/// Coefficient slots varied by the shape solver: the mean radius and modes 2..=top.
pub(crate) fn free_slots(dimension: usize, top: usize) -> Vec<usize> {
    let mut s = vec![0];
    if dimension == 2 {
        s.extend(3..=2 * top);
    } else {
        s.extend(2..=top);
    }
    s
}

/// Find a domain satisfying the normalized overdetermined condition with |Ω| = ω_N, starting
/// from `initial`.
pub fn solve_shape(
    dimension: usize,
    gamma: f64,
    initial: &StarDomain,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    if initial.dimension() != dimension || !(dimension == 2 || dimension == 3) {
        return Err(Error::UnsupportedDimension {
            dimension,
            operation: "shape solve",
        });
    }
    let start = recenter(initial)?;
    let top = opts.shape_modes.max(start.degree()).max(2);
    let base = start.padded_coefficients(top);
    let slots = free_slots(dimension, top);
    let target = unit_ball_volume(dimension);
    let solver = opts.solver();
    let nodes = residual_nodes(dimension, top);
    let build = |x: &[f64]| -> Option<StarDomain> {
        let mut c = base.clone();
        for (s, v) in slots.iter().zip(x) {
            c[*s] = *v;
        }
        start.with_coefficients(c).ok()
    };
    let stacked = |x: &[f64]| -> Option<Vec<f64>> {
        let d = build(x)?;
        let (mut r, _) = weighted_residual(&d, gamma, &solver, nodes)?;
        r.push(opts.volume_weight * (d.volume() - target));
        Some(r)
    };
    let x0: Vec<f64> = slots.iter().map(|s| base[*s]).collect();
    let out = levenberg_marquardt(stacked, x0, &opts.lm());
    let final_domain = build(&out.x).unwrap_or(start);
    Ok(SolveReport {
        converged: out.converged,
        residual_norm: out.residual_norm,
        volume_gap: (final_domain.volume() - target).abs(),
        distance_to_ball: distance_to_ball(&final_domain),
        iterations: out.iterations,
        final_domain,
        diagnostic: out.diagnostic,
    })
}
