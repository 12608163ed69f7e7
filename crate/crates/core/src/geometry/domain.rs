use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gauss_legendre, legendre_polar, uniform_angles, unit_ball_volume};

/// Radius and its first two derivatives with respect to the graph parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
}

/// A star-shaped domain given as a positive radial graph over its center.
///
/// * `dimension == 2`: `R(θ) = a₀ + Σ_k (a_k cos kθ + b_k sin kθ)`, coefficients stored as
///   `[a₀, a₁, b₁, …, a_K, b_K]`.
/// * `dimension == 3` (axisymmetric about the z-axis): `R(φ) = Σ_l c_l P_l(cos φ)`,
///   φ the polar angle, coefficients `[c₀, …, c_L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainFile", into = "DomainFile")]
pub struct StarDomain {
    dimension: usize,
    coefficients: Vec<f64>,
    center: Vec<f64>,
}

/// On-disk layout: `{"dimension": 2|3, "coefficients": [...], "center": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainFile {
    pub dimension: usize,
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
}

impl TryFrom<DomainFile> for StarDomain {
    type Error = Error;

    fn try_from(f: DomainFile) -> Result<Self> {
        let center = f.center.unwrap_or_else(|| vec![0.0; f.dimension]);
        StarDomain::new(f.dimension, f.coefficients, center)
    }
}

impl From<StarDomain> for DomainFile {
    fn from(d: StarDomain) -> Self {
        DomainFile {
            dimension: d.dimension,
            coefficients: d.coefficients,
            center: Some(d.center),
        }
    }
}

const POSITIVITY_SAMPLES: usize = 4096;

impl StarDomain {
    pub fn new(dimension: usize, coefficients: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        match dimension {
            2 => {
                if coefficients.is_empty() || coefficients.len() % 2 == 0 {
                    return Err(Error::InvalidDomain(format!(
                        "planar coefficients must have odd length (a0, a1, b1, ...), got {}",
                        coefficients.len()
                    )));
                }
            }
            3 => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidDomain("no Legendre coefficients".into()));
                }
            }
            _ => {
                return Err(Error::UnsupportedDimension {
                    dimension,
                    operation: "radial-graph domain",
                })
            }
        }
        if center.len() != dimension {
            return Err(Error::InvalidDomain(format!(
                "center has {} components, expected {dimension}",
                center.len()
            )));
        }
        if dimension == 3 && (center[0] != 0.0 || center[1] != 0.0) {
            return Err(Error::InvalidDomain(
                "axisymmetric domains must be centered on the symmetry axis".into(),
            ));
        }
        if coefficients.iter().chain(&center).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain("non-finite coefficient".into()));
        }
        let domain = StarDomain {
            dimension,
            coefficients,
            center,
        };
        domain.check_positive()?;
        domain.amplitude_guard();
        Ok(domain)
    }

    pub fn planar(coefficients: Vec<f64>) -> Result<Self> {
        Self::new(2, coefficients, vec![0.0, 0.0])
    }

    pub fn axisymmetric(coefficients: Vec<f64>) -> Result<Self> {
        Self::new(3, coefficients, vec![0.0, 0.0, 0.0])
    }

    /// Ball of the given radius centered at the origin.
    pub fn ball(dimension: usize, radius: f64) -> Result<Self> {
        Self::new(dimension, vec![radius], vec![0.0; dimension])
    }

    pub fn unit_ball(dimension: usize) -> Self {
        Self::ball(dimension, 1.0).expect("unit ball is valid")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Highest Fourier (N = 2) or Legendre (N = 3) mode present.
    pub fn degree(&self) -> usize {
        match self.dimension {
            2 => (self.coefficients.len() - 1) / 2,
            _ => self.coefficients.len() - 1,
        }
    }

    /// Mode number carried by coefficient `index`.
    pub fn mode_of_index(dimension: usize, index: usize) -> usize {
        if dimension == 2 {
            (index + 1) / 2
        } else {
            index
        }
    }

    /// Spherical mean of the radius (a₀ or c₀).
    pub fn mean_radius(&self) -> f64 {
        self.coefficients[0]
    }

    /// Upper bound on |R - mean| from the coefficient magnitudes.
    pub fn amplitude(&self) -> f64 {
        self.coefficients[1..].iter().map(|c| c.abs()).sum()
    }

    /// R and its derivatives at the graph parameter (θ for N = 2, φ for N = 3).
    pub fn radial(&self, t: f64) -> RadialSample {
        if self.dimension == 2 {
            let c = &self.coefficients;
            let mut s = RadialSample {
                r: c[0],
                dr: 0.0,
                ddr: 0.0,
            };
            for k in 1..=self.degree() {
                let kf = k as f64;
                let (sn, cs) = (kf * t).sin_cos();
                let (a, b) = (c[2 * k - 1], c[2 * k]);
                s.r += a * cs + b * sn;
                s.dr += kf * (-a * sn + b * cs);
                s.ddr -= kf * kf * (a * cs + b * sn);
            }
            s
        } else {
            let (sn, cs) = t.sin_cos();
            let (p, d1, d2) = legendre_polar(self.degree(), cs, sn);
            let dot = |v: &[f64]| v.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum();
            RadialSample {
                r: dot(&p),
                dr: dot(&d1),
                ddr: dot(&d2),
            }
        }
    }

    /// R and derivatives at x = cos φ (N = 3 only), avoiding an acos round trip.
    pub(crate) fn radial_at_cos(&self, x: f64) -> RadialSample {
        debug_assert_eq!(self.dimension, 3);
        let s = (1.0 - x * x).max(0.0).sqrt();
        let (p, d1, d2) = legendre_polar(self.degree(), x, s);
        let dot = |v: &[f64]| v.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum();
        RadialSample {
            r: dot(&p),
            dr: dot(&d1),
            ddr: dot(&d2),
        }
    }

    /// Point of Σ at the graph parameter, in absolute coordinates. Axisymmetric points lie
    /// in the x–z half plane.
    pub fn point(&self, t: f64) -> [f64; 3] {
        let r = self.radial(t).r;
        let c = &self.center;
        if self.dimension == 2 {
            [c[0] + r * t.cos(), c[1] + r * t.sin(), 0.0]
        } else {
            [r * t.sin(), 0.0, c[2] + r * t.cos()]
        }
    }

    fn check_positive(&self) -> Result<()> {
        let n = POSITIVITY_SAMPLES.max(64 * self.degree());
        let bad = if self.dimension == 2 {
            uniform_angles(n, 0.0)
                .into_iter()
                .map(|t| self.radial(t).r)
                .find(|r| *r <= 0.0 || !r.is_finite())
        } else {
            (0..=n)
                .map(|j| self.radial(PI * j as f64 / n as f64).r)
                .find(|r| *r <= 0.0 || !r.is_finite())
        };
        match bad {
            Some(r) => Err(Error::InvalidDomain(format!(
                "radial function is not positive (sample value {r:.3e})"
            ))),
            None => Ok(()),
        }
    }

    fn amplitude_guard(&self) {
        let mean = self.mean_radius();
        let n = 512.max(16 * self.degree());
        let max_dev = (0..n)
            .map(|j| {
                let t = if self.dimension == 2 {
                    2.0 * PI * j as f64 / n as f64
                } else {
                    PI * j as f64 / (n - 1) as f64
                };
                (self.radial(t).r - mean).abs()
            })
            .fold(0.0, f64::max);
        if max_dev > 0.5 * mean {
            log::warn!(
                "large deformation: max |R - mean| = {max_dev:.3} exceeds half the mean radius {mean:.3}; \
                 exterior solves may lose accuracy"
            );
        }
    }

    /// |Ω|.
    pub fn volume(&self) -> f64 {
        let c = &self.coefficients;
        if self.dimension == 2 {
            // (1/2)∫R² dθ, exact by Parseval.
            let tail: f64 = c[1..].iter().map(|v| v * v).sum();
            PI * c[0] * c[0] + 0.5 * PI * tail
        } else {
            // (2π/3)∫R³ dx is a polynomial integral of degree 3L.
            let n = (3 * self.degree()) / 2 + 2;
            let (x, w) = gauss_legendre(n);
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(&x, w)| w * self.radial_at_cos(x).r.powi(3))
                .sum();
            2.0 * PI / 3.0 * s
        }
    }

    /// |Σ|: arc length (N = 2) or surface area (N = 3).
    pub fn surface_measure(&self) -> f64 {
        let mut n = 256.max(32 * (self.degree() + 1));
        let mut prev = self.surface_measure_with(n);
        loop {
            n *= 2;
            let next = self.surface_measure_with(n);
            if (next - prev).abs() <= 1e-13 * next || n >= 1 << 15 {
                return next;
            }
            prev = next;
        }
    }

    fn surface_measure_with(&self, n: usize) -> f64 {
        if self.dimension == 2 {
            let total: f64 = uniform_angles(n, 0.0)
                .into_iter()
                .map(|t| {
                    let s = self.radial(t);
                    s.r.hypot(s.dr)
                })
                .sum();
            2.0 * PI * total / n as f64
        } else {
            let (x, w) = gauss_legendre(n);
            x.iter()
                .zip(&w)
                .map(|(&x, w)| {
                    let s = self.radial_at_cos(x);
                    2.0 * PI * w * s.r * s.r.hypot(s.dr)
                })
                .sum()
        }
    }

    /// Same shape scaled by `factor` about its center.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let coefficients = self.coefficients.iter().map(|c| c * factor).collect();
        Self::new(self.dimension, coefficients, self.center.clone())
    }

    /// Rigid translation: the point set moves by `offset`, the parameterization is kept.
    pub fn shifted(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dimension {
            return Err(Error::InvalidArgument("offset dimension mismatch".into()));
        }
        let center = self.center.iter().zip(offset).map(|(c, o)| c + o).collect();
        Self::new(self.dimension, self.coefficients.clone(), center)
    }

    /// Same shape rescaled about its center to the volume of the unit ball.
    pub fn with_unit_volume(&self) -> Result<Self> {
        let factor =
            (unit_ball_volume(self.dimension) / self.volume()).powf(1.0 / self.dimension as f64);
        self.scaled(factor)
    }

    /// Copy with replaced coefficients and the same center.
    pub fn with_coefficients(&self, coefficients: Vec<f64>) -> Result<Self> {
        Self::new(self.dimension, coefficients, self.center.clone())
    }

    /// Coefficient vector padded with zeros to hold modes up to `degree`.
    pub fn padded_coefficients(&self, degree: usize) -> Vec<f64> {
        let len = if self.dimension == 2 {
            2 * degree + 1
        } else {
            degree + 1
        };
        let mut c = self.coefficients.clone();
        if c.len() < len {
            c.resize(len, 0.0);
        }
        c
    }

    /// Minimum of R over a dense sample.
    pub fn min_radius(&self) -> f64 {
        self.sample_radii()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximum of R over a dense sample.
    pub fn max_radius(&self) -> f64 {
        self.sample_radii().into_iter().fold(0.0, f64::max)
    }

    fn sample_radii(&self) -> Vec<f64> {
        let n = 2048.max(32 * self.degree());
        if self.dimension == 2 {
            uniform_angles(n, 0.0)
                .into_iter()
                .map(|t| self.radial(t).r)
                .collect()
        } else {
            (0..=n)
                .map(|j| self.radial(PI * j as f64 / n as f64).r)
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_radius() {
        let err = StarDomain::planar(vec![0.5, 0.0, 0.0, 0.6, 0.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidDomain(_)));
        assert!(StarDomain::axisymmetric(vec![0.2, 0.0, 0.5]).is_err());
        assert!(StarDomain::planar(vec![1.0, 0.0]).is_err());
        assert!(StarDomain::new(3, vec![1.0], vec![0.1, 0.0, 0.0]).is_err());
        assert!(StarDomain::new(4, vec![1.0], vec![0.0; 4]).is_err());
    }

    #[test]
    fn ball_volumes_and_areas() {
        let d2 = StarDomain::unit_ball(2);
        assert!((d2.volume() - PI).abs() < 1e-14);
        assert!(
            (d2.surface_measure() - 2.0 * PI).abs() < 1e-13,
            "{}",
            d2.surface_measure() - 2.0 * PI
        );
        let d3 = StarDomain::unit_ball(3);
        assert!((d3.volume() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((d3.surface_measure() - 4.0 * PI).abs() < 1e-13);
        let b = StarDomain::ball(3, 2.0).unwrap();
        assert!((b.volume() - 32.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn poles_have_zero_slope() {
        let d = StarDomain::axisymmetric(vec![1.0, 0.05, 0.1, -0.03, 0.02]).unwrap();
        assert!(d.radial(0.0).dr.abs() < 1e-15);
        assert!(d.radial(PI).dr.abs() < 1e-15);
    }

    #[test]
    fn json_layout() {
        let d = StarDomain::planar(vec![1.0, 0.0, 0.0, 0.1, 0.0]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"{"dimension":2,"coefficients":[1.0,0.0,0.0,0.1,0.0],"center":[0.0,0.0]}"#
        );
        let back: StarDomain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let bad = serde_json::from_str::<StarDomain>(r#"{"dimension":3,"coefficients":[-1.0]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn unit_volume_rescaling() {
        let d = StarDomain::axisymmetric(vec![1.3, 0.0, 0.1]).unwrap();
        let v = d.with_unit_volume().unwrap().volume();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
