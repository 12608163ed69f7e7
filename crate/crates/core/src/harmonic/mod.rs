//! Exterior harmonic functions: the capacitary potential of a star-shaped domain.

mod energy;
mod kernel;
mod solve;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, StarDomain};
use crate::special::legendre_with_derivative;

pub use energy::dirichlet_energy;
pub use solve::{solve_dirichlet, solve_dirichlet_data, solve_dirichlet_with, SolverOptions};

/// A point singularity inside Ω: a logarithmic charge (N = 2) or a uniformly charged
/// coaxial ring (N = 3). `position` is relative to the expansion center, in (x, y) for
/// N = 2 and (ring radius ρ, height z) for N = 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub position: [f64; 2],
    pub strength: f64,
}

/// Exterior harmonic function about `center`.
///
/// * N = 2: `u = log_coefficient·log r + constant_term + Σ_k r^{-k}(a_k cos kθ + b_k sin kθ)
///   + Σ_j s_j (log|x - y_j| - log r)`, with `decay = [a₁, b₁, …, a_K, b_K]`.
/// * N = 3: `u = Σ_l c_l r^{-(l+1)} P_l(cos φ) + Σ_j s_j G_j`, with `G_j` the mean of
///   `1/|x - y|` over the j-th ring and `decay = [c₀, …, c_L]`.
///
/// Sources are only present when the multipole series alone could not fit the boundary data;
/// every source term decays at infinity, so the far-field normalization is carried by the
/// multipole part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorExpansion {
    pub dimension: usize,
    pub log_coefficient: f64,
    pub constant_term: f64,
    pub decay: Vec<f64>,
    pub fit_residual: f64,
    #[serde(default)]
    pub center: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<Source>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(skip)]
    domain: Option<StarDomain>,
}

impl ExteriorExpansion {
    pub(crate) fn new(dimension: usize, center: Vec<f64>) -> Self {
        ExteriorExpansion {
            dimension,
            log_coefficient: 0.0,
            constant_term: 0.0,
            decay: Vec::new(),
            fit_residual: 0.0,
            center,
            sources: Vec::new(),
            warning: None,
            domain: None,
        }
    }

    /// The domain this expansion was fitted on, if known.
    pub fn domain(&self) -> Option<&StarDomain> {
        self.domain.as_ref()
    }

    pub(crate) fn set_domain(&mut self, domain: &StarDomain) {
        self.domain = Some(domain.clone());
    }

    fn frame(&self, x: &[f64; 3]) -> [f64; 2] {
        let c = |i: usize| self.center.get(i).copied().unwrap_or(0.0);
        if self.dimension == 2 {
            [x[0] - c(0), x[1] - c(1)]
        } else {
            [(x[0] - c(0)).hypot(x[1] - c(1)), x[2] - c(2)]
        }
    }

    /// u(x) at an absolute point.
    pub fn value(&self, x: &[f64; 3]) -> f64 {
        self.frame_value(self.frame(x))
    }

    /// ∇u(x) at an absolute point.
    pub fn gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        let p = self.frame(x);
        let g = self.frame_gradient(p);
        if self.dimension == 2 {
            [g[0], g[1], 0.0]
        } else {
            let c = |i: usize| self.center.get(i).copied().unwrap_or(0.0);
            let (dx, dy) = (x[0] - c(0), x[1] - c(1));
            if p[0] > 0.0 {
                [g[0] * dx / p[0], g[0] * dy / p[0], g[1]]
            } else {
                [0.0, 0.0, g[1]]
            }
        }
    }

    /// Value in frame coordinates.
    pub(crate) fn frame_value(&self, p: [f64; 2]) -> f64 {
        if self.dimension == 2 {
            let r = p[0].hypot(p[1]);
            let t = p[1].atan2(p[0]);
            let mut u = self.log_coefficient * r.ln() + self.constant_term;
            let mut rk = 1.0;
            for k in 1..=self.decay.len() / 2 {
                rk /= r;
                let (sn, cs) = (k as f64 * t).sin_cos();
                u += rk * (self.decay[2 * k - 2] * cs + self.decay[2 * k - 1] * sn);
            }
            for s in &self.sources {
                u += s.strength * kernel::log_value(p, s.position);
            }
            u
        } else {
            let r = p[0].hypot(p[1]);
            let x = p[1] / r;
            let pl = crate::special::legendre(self.decay.len().saturating_sub(1), x);
            let mut u = 0.0;
            let mut rl = 1.0 / r;
            for (c, p) in self.decay.iter().zip(&pl) {
                u += c * rl * p;
                rl /= r;
            }
            for s in &self.sources {
                u += s.strength * kernel::ring_value(p, s.position);
            }
            u
        }
    }

    /// Gradient in frame coordinates: (∂x, ∂y) for N = 2, (∂ρ, ∂z) for N = 3.
    pub(crate) fn frame_gradient(&self, p: [f64; 2]) -> [f64; 2] {
        let r = p[0].hypot(p[1]);
        let er = [p[0] / r, p[1] / r];
        if self.dimension == 2 {
            let t = p[1].atan2(p[0]);
            let et = [-er[1], er[0]];
            let mut gr = self.log_coefficient / r;
            let mut gt = 0.0;
            let mut rk = 1.0 / r;
            for k in 1..=self.decay.len() / 2 {
                rk /= r;
                let kf = k as f64;
                let (sn, cs) = (kf * t).sin_cos();
                let (a, b) = (self.decay[2 * k - 2], self.decay[2 * k - 1]);
                gr -= kf * rk * (a * cs + b * sn);
                gt += kf * rk * (b * cs - a * sn);
            }
            let mut g = [gr * er[0] + gt * et[0], gr * er[1] + gt * et[1]];
            for s in &self.sources {
                let k = kernel::log_gradient(p, s.position);
                g[0] += s.strength * k[0];
                g[1] += s.strength * k[1];
            }
            g
        } else {
            // e_r = (sin φ, cos φ), e_φ = (cos φ, -sin φ) in (ρ, z).
            let (sn, x) = (er[0], er[1]);
            let (pl, dpl) = legendre_with_derivative(self.decay.len().saturating_sub(1), x);
            let mut gr = 0.0;
            let mut gp = 0.0;
            let mut rl = 1.0 / (r * r);
            for (l, c) in self.decay.iter().enumerate() {
                gr -= (l + 1) as f64 * c * rl * pl[l];
                gp -= c * rl * sn * dpl[l];
                rl /= r;
            }
            let mut g = [gr * sn + gp * x, gr * x - gp * sn];
            for s in &self.sources {
                let k = kernel::ring_gradient(p, s.position);
                g[0] += s.strength * k[0];
                g[1] += s.strength * k[1];
            }
            g
        }
    }

    /// Multipole coefficients of the whole function about the center, modes 0..=degree
    /// (N = 3 only). Ring sources are expanded with `1/|x-y| = Σ s^l/r^{l+1} P_l(cos γ)`
    /// averaged over the ring; the series converges for r beyond every source.
    pub(crate) fn merged_multipoles(&self, degree: usize) -> Vec<f64> {
        debug_assert_eq!(self.dimension, 3);
        let mut d = vec![0.0; degree + 1];
        for (l, c) in self.decay.iter().enumerate().take(degree + 1) {
            d[l] = *c;
        }
        for s in &self.sources {
            let rad = s.position[0].hypot(s.position[1]);
            if rad == 0.0 {
                d[0] += s.strength;
                continue;
            }
            let pl = crate::special::legendre(degree, s.position[1] / rad);
            let mut sl = 1.0;
            for l in 0..=degree {
                d[l] += s.strength * sl * pl[l];
                sl *= rad;
            }
        }
        d
    }

    /// Largest distance from the center to a source.
    pub(crate) fn source_radius(&self) -> f64 {
        self.sources
            .iter()
            .map(|s| s.position[0].hypot(s.position[1]))
            .fold(0.0, f64::max)
    }
}

/// ∂_ν u at the grid nodes.
pub fn neumann_trace(expansion: &ExteriorExpansion, grid: &BoundaryGrid) -> Result<Vec<f64>> {
    if expansion.dimension != grid.dimension {
        return Err(Error::GridMismatch);
    }
    if let Some(d) = expansion.domain() {
        if d != grid.domain() {
            return Err(Error::GridMismatch);
        }
    }
    Ok(grid
        .positions
        .iter()
        .zip(&grid.normals)
        .map(|(x, n)| {
            let g = expansion.gradient(x);
            g[0] * n[0] + g[1] * n[1] + g[2] * n[2]
        })
        .collect())
}
