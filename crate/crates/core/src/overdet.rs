//! The overdetermined boundary condition, its normalization and the spherical compatibility
//! constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, StarDomain};
use crate::harmonic::{neumann_trace, solve_dirichlet_with, ExteriorExpansion, SolverOptions};
use crate::special::unit_ball_volume;

/// Physical data: Dirichlet level `u0`, curvature coupling `gamma`, volume radius `r0`
/// (|Ω| = ω_N r0^N) and, in the plane, the logarithmic strength `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemData {
    pub dimension: usize,
    pub u0: f64,
    pub gamma: f64,
    pub r0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl ProblemData {
    pub fn new(dimension: usize, u0: f64, gamma: f64, r0: f64, alpha: Option<f64>) -> Result<Self> {
        let d = ProblemData {
            dimension,
            u0,
            gamma,
            r0,
            alpha,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::UnsupportedDimension {
                dimension: self.dimension,
                operation: "overdetermined problem",
            });
        }
        if !(self.r0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "R0 must be positive, got {}",
                self.r0
            )));
        }
        if self.dimension == 2 {
            match self.alpha {
                Some(a) if a != 0.0 => {}
                _ => {
                    return Err(Error::InvalidArgument(
                        "planar problems need a nonzero log strength alpha".into(),
                    ))
                }
            }
        } else if self.u0 == 0.0 {
            return Err(Error::AlexandrovCase);
        }
        Ok(())
    }
}

/// The problem after rescaling to |Ω| = ω_N: `∂_ν u = Γ𝓗 + Γ - (N-2)` on Σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedProblem {
    pub dimension: usize,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub target_volume: f64,
}

impl NormalizedProblem {
    pub fn new(dimension: usize, gamma: f64) -> Self {
        NormalizedProblem {
            dimension,
            gamma,
            target_volume: unit_ball_volume(dimension),
        }
    }

    /// λ = Γ - (N-2), or Γ - 1 in the plane.
    pub fn lambda(&self) -> f64 {
        self.gamma - ball_flux_density(self.dimension)
    }
}

/// -∂_ν u on the unit sphere: N - 2, and 1 for the planar logarithmic potential.
pub fn ball_flux_density(dimension: usize) -> f64 {
    if dimension == 2 {
        1.0
    } else {
        dimension as f64 - 2.0
    }
}

/// C₀ = (γ - (N-2)u₀)/R₀ for N ≥ 3, (γ - α)/R₀ for N = 2.
pub fn compatibility_constant(data: &ProblemData) -> Result<f64> {
    data.validate()?;
    let numerator = if data.dimension == 2 {
        data.gamma - data.alpha.unwrap_or(0.0)
    } else {
        data.gamma - (data.dimension as f64 - 2.0) * data.u0
    };
    Ok(numerator / data.r0)
}

/// Γ = γ/u₀ (N ≥ 3) or γ/α (N = 2).
pub fn normalize(data: &ProblemData) -> Result<NormalizedProblem> {
    data.validate()?;
    let denominator = if data.dimension == 2 {
        data.alpha.unwrap_or(0.0)
    } else {
        data.u0
    };
    Ok(NormalizedProblem::new(
        data.dimension,
        data.gamma / denominator,
    ))
}

/// Pointwise residual of the normalized condition and its L²(Σ) norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub values: Vec<f64>,
    pub l2_norm: f64,
}

/// `∂_ν u - Γ𝓗 - (Γ - (N-2))` at the grid nodes (`Γ - 1` replaces `Γ - (N-2)` when N = 2).
pub fn residual(
    domain: &StarDomain,
    expansion: &ExteriorExpansion,
    grid: &BoundaryGrid,
    gamma: f64,
) -> Result<Residual> {
    if grid.domain() != domain || expansion.domain().is_some_and(|d| d != domain) {
        return Err(Error::GridMismatch);
    }
    let dn = neumann_trace(expansion, grid)?;
    let shift = gamma - ball_flux_density(domain.dimension());
    let values: Vec<f64> = dn
        .iter()
        .zip(&grid.curvature_normalized)
        .map(|(d, h)| d - gamma * h - shift)
        .collect();
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let l2_norm = grid.integrate(&sq).sqrt();
    Ok(Residual { values, l2_norm })
}

/// Solve the Dirichlet problem on `domain` and evaluate the residual on a fresh grid.
pub fn solve_residual(
    domain: &StarDomain,
    gamma: f64,
    solver: &SolverOptions,
    node_count: usize,
) -> Result<(ExteriorExpansion, BoundaryGrid, Residual)> {
    let e = solve_dirichlet_with(domain, solver)?;
    let g = BoundaryGrid::new(domain, node_count)?;
    let r = residual(domain, &e, &g, gamma)?;
    Ok((e, g, r))
}

/// Scalars of the conformal metric g_Γ = u^{2/Γ}δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalScalars {
    /// Constant mean curvature of Σ in g_Γ: ((N-1)/Γ)(Γ - (N-2)).
    pub h_conformal: f64,
    /// (N-2)/2, where the scalar curvature changes sign.
    pub scalar_threshold: f64,
    /// Sign of 2Γ - (N-2): -1, 0 or 1.
    pub scalar_sign: i32,
}

pub fn conformal_scalars(gamma: f64, dimension: usize) -> Result<ConformalScalars> {
    if dimension < 3 {
        return Err(Error::UnsupportedDimension {
            dimension,
            operation: "conformal metric",
        });
    }
    if gamma == 0.0 {
        return Err(Error::UndefinedConformalMetric);
    }
    let n = dimension as f64;
    let s = 2.0 * gamma - (n - 2.0);
    let scalar_sign = if s.abs() <= 1e-14 * n {
        0
    } else if s > 0.0 {
        1
    } else {
        -1
    };
    Ok(ConformalScalars {
        h_conformal: (n - 1.0) / gamma * (gamma - (n - 2.0)),
        scalar_threshold: 0.5 * (n - 2.0),
        scalar_sign,
    })
}
