use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::domain::StarDomain;
use crate::error::{Error, Result};
use crate::special::{gauss_legendre, uniform_angles};

/// Collocation nodes on Σ with the geometric data every identity needs.
///
/// Planar grids use equispaced θ with trapezoid weights. Axisymmetric grids use Gauss–Legendre
/// nodes in cos φ with the azimuthal factor 2π folded into the weights; their positions and
/// normals lie in the x–z half plane (y = 0). Curvature conventions: `curvature_normalized`
/// is 𝓗 with 𝓗(∂B_R) = -1/R, `curvature_mean` is H = -(N-1)𝓗.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    pub dimension: usize,
    /// θ_i (N = 2) or φ_j (N = 3).
    pub nodes: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    /// dS quadrature weights: Σ_i w_i f(x_i) ≈ ∫_Σ f dS.
    pub weights: Vec<f64>,
    /// Weights of the underlying parameter rule (dθ or d(cos φ)), used for mode projections.
    pub parameter_weights: Vec<f64>,
    pub curvature_normalized: Vec<f64>,
    pub curvature_mean: Vec<f64>,
    pub tracefree_sq: Vec<f64>,
    domain: StarDomain,
}

/// Support-function weighted curvature moments of Σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiMoments {
    /// ∫(x·ν) dS
    pub m0: f64,
    /// ∫(x·ν) H dS
    pub m1: f64,
    /// ∫(x·ν) H² dS
    pub m2: f64,
    /// ∫(x·ν) |Å|² dS
    pub ma: f64,
}

impl BoundaryGrid {
    pub fn new(domain: &StarDomain, node_count: usize) -> Result<Self> {
        Self::with_offset(domain, node_count, 0.0)
    }

    /// Planar grids shift the nodes by `offset` spacings; axisymmetric grids ignore it
    /// (Gauss nodes of different orders never coincide).
    pub fn with_offset(domain: &StarDomain, node_count: usize, offset: f64) -> Result<Self> {
        if node_count < 8 {
            return Err(Error::InvalidArgument(format!(
                "boundary grid needs at least 8 nodes, got {node_count}"
            )));
        }
        let mut g = BoundaryGrid {
            dimension: domain.dimension(),
            nodes: Vec::with_capacity(node_count),
            positions: Vec::with_capacity(node_count),
            normals: Vec::with_capacity(node_count),
            weights: Vec::with_capacity(node_count),
            parameter_weights: Vec::with_capacity(node_count),
            curvature_normalized: Vec::with_capacity(node_count),
            curvature_mean: Vec::with_capacity(node_count),
            tracefree_sq: Vec::with_capacity(node_count),
            domain: domain.clone(),
        };
        let c = domain.center();
        if domain.dimension() == 2 {
            let h = 2.0 * PI / node_count as f64;
            for t in uniform_angles(node_count, offset) {
                let s = domain.radial(t);
                if s.r <= 0.0 {
                    return Err(Error::InvalidDomain("non-positive radius sample".into()));
                }
                let w = s.r.hypot(s.dr);
                let (sn, cs) = t.sin_cos();
                // ν = (R e_r - R' e_θ)/W
                let nx = (s.r * cs + s.dr * sn) / w;
                let ny = (s.r * sn - s.dr * cs) / w;
                let kappa = (s.r * s.r + 2.0 * s.dr * s.dr - s.r * s.ddr) / w.powi(3);
                g.nodes.push(t);
                g.positions.push([c[0] + s.r * cs, c[1] + s.r * sn, 0.0]);
                g.normals.push([nx, ny, 0.0]);
                g.weights.push(h * w);
                g.parameter_weights.push(h);
                g.curvature_normalized.push(-kappa);
                g.curvature_mean.push(kappa);
                g.tracefree_sq.push(0.0);
            }
        } else {
            let (xs, ws) = gauss_legendre(node_count);
            for (&x, &gw) in xs.iter().zip(&ws) {
                let s = domain.radial_at_cos(x);
                if s.r <= 0.0 {
                    return Err(Error::InvalidDomain("non-positive radius sample".into()));
                }
                let sn = (1.0 - x * x).sqrt();
                let w = s.r.hypot(s.dr);
                // e_r = (sin φ, cos φ), e_φ = (cos φ, -sin φ) in (ρ, z).
                let n_rho = (s.r * sn - s.dr * x) / w;
                let n_z = (s.r * x + s.dr * sn) / w;
                let k_meridian = (s.r * s.r + 2.0 * s.dr * s.dr - s.r * s.ddr) / w.powi(3);
                let k_parallel = n_rho / (s.r * sn);
                let h = k_meridian + k_parallel;
                g.nodes.push(x.acos());
                g.positions.push([s.r * sn, 0.0, c[2] + s.r * x]);
                g.normals.push([n_rho, 0.0, n_z]);
                g.weights.push(2.0 * PI * gw * s.r * w);
                g.parameter_weights.push(gw);
                g.curvature_normalized.push(-0.5 * h);
                g.curvature_mean.push(h);
                g.tracefree_sq.push(0.5 * (k_meridian - k_parallel).powi(2));
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn domain(&self) -> &StarDomain {
        &self.domain
    }

    /// Grid quadrature of nodal samples.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        self.weights.iter().zip(f).map(|(w, f)| w * f).sum()
    }

    /// Σ weights.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Support function x·ν with x measured from the coordinate origin.
    pub fn support(&self) -> Vec<f64> {
        self.positions
            .iter()
            .zip(&self.normals)
            .map(|(p, n)| p[0] * n[0] + p[1] * n[1] + p[2] * n[2])
            .collect()
    }

    /// L^p(Σ) norm of nodal samples.
    pub fn lp_norm(&self, f: &[f64], p: f64) -> f64 {
        let s: f64 = self
            .weights
            .iter()
            .zip(f)
            .map(|(w, f)| w * f.abs().powf(p))
            .sum();
        s.powf(1.0 / p)
    }

    pub fn minkowski_moments(&self) -> MinkowskiMoments {
        let xn = self.support();
        let mut m = MinkowskiMoments {
            m0: 0.0,
            m1: 0.0,
            m2: 0.0,
            ma: 0.0,
        };
        for i in 0..self.len() {
            let w = self.weights[i] * xn[i];
            let h = self.curvature_mean[i];
            m.m0 += w;
            m.m1 += w * h;
            m.m2 += w * h * h;
            m.ma += w * self.tracefree_sq[i];
        }
        m
    }

    /// Node table as CSV: node, position, normal, weight, curvature columns.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let axes: &[usize] = if self.dimension == 2 {
            &[0, 1]
        } else {
            &[0, 1, 2]
        };
        let names = ["x", "y", "z"];
        let mut header = vec!["node".to_string()];
        header.extend(axes.iter().map(|&a| names[a].to_string()));
        header.extend(axes.iter().map(|&a| format!("n{}", names[a])));
        header.extend(
            [
                "weight",
                "curvature_normalized",
                "curvature_mean",
                "tracefree_sq",
            ]
            .iter()
            .map(|s| s.to_string()),
        );
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.nodes[i].to_string()];
            row.extend(axes.iter().map(|&a| self.positions[i][a].to_string()));
            row.extend(axes.iter().map(|&a| self.normals[i][a].to_string()));
            row.push(self.weights[i].to_string());
            row.push(self.curvature_normalized[i].to_string());
            row.push(self.curvature_mean[i].to_string());
            row.push(self.tracefree_sq[i].to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_grids() {
        assert!(BoundaryGrid::new(&StarDomain::unit_ball(2), 4).is_err());
    }

    #[test]
    fn unit_circle_grid() {
        let g = BoundaryGrid::new(&StarDomain::unit_ball(2), 64).unwrap();
        assert!((g.total_weight() - 2.0 * PI).abs() < 1e-13);
        for i in 0..g.len() {
            assert!((g.curvature_normalized[i] + 1.0).abs() < 1e-14);
            assert!((g.curvature_mean[i] - 1.0).abs() < 1e-14);
            let n = g.normals[i];
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_sphere_grid() {
        let g = BoundaryGrid::new(&StarDomain::unit_ball(3), 32).unwrap();
        assert!((g.total_weight() - 4.0 * PI).abs() < 1e-13);
        for i in 0..g.len() {
            assert!((g.curvature_mean[i] - 2.0).abs() < 1e-13);
            assert!((g.curvature_normalized[i] + 1.0).abs() < 1e-13);
            assert!(g.tracefree_sq[i].abs() < 1e-24);
        }
        let m = g.minkowski_moments();
        assert!((m.m0 - 4.0 * PI).abs() < 1e-12);
        assert!((m.m1 - 8.0 * PI).abs() < 1e-12);
        assert!((m.m2 - 16.0 * PI).abs() < 1e-12);
        assert!(m.ma.abs() < 1e-20);
    }

    #[test]
    fn sphere_of_radius_two_has_curvature_half() {
        let g = BoundaryGrid::new(&StarDomain::ball(3, 2.0).unwrap(), 16).unwrap();
        assert!(g
            .curvature_normalized
            .iter()
            .all(|h| (h + 0.5).abs() < 1e-14));
        let c = BoundaryGrid::new(&StarDomain::ball(2, 2.0).unwrap(), 16).unwrap();
        assert!(c.curvature_mean.iter().all(|h| (h - 0.5).abs() < 1e-14));
    }

    #[test]
    fn unit_circle_moments() {
        let g = BoundaryGrid::new(&StarDomain::unit_ball(2), 64).unwrap();
        let m = g.minkowski_moments();
        assert!((m.m0 - 2.0 * PI).abs() < 1e-13);
        assert!((m.m1 - 2.0 * PI).abs() < 1e-13);
        assert_eq!(m.ma, 0.0);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = BoundaryGrid::new(&StarDomain::unit_ball(3), 8).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "node,x,y,z,nx,ny,nz,weight,curvature_normalized,curvature_mean,tracefree_sq"
        );
        assert_eq!(lines.count(), 8);
    }
}
