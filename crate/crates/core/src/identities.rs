//! Both sides of the integral identities and inequalities satisfied by capacitary potentials
//! and by the overdetermined problem.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, StarDomain};
use crate::harmonic::{
    dirichlet_energy, neumann_trace, solve_dirichlet_with, ExteriorExpansion, SolverOptions,
};
use crate::special::{unit_ball_volume, unit_sphere_measure};

/// Slack allowed on the right side of an inequality, relative to max(1, |rhs|).
pub const INEQUALITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// lhs = rhs, satisfied when rel_gap ≤ tolerance.
    Identity,
    /// lhs ≤ rhs, satisfied when lhs ≤ rhs + tolerance·max(1, |rhs|).
    Inequality,
}

/// One identity or inequality evaluated on one domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub tolerance: f64,
    pub satisfied: bool,
    /// rhs - lhs for inequalities whose equality case is meaningful.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<f64>,
}

impl IdentityReport {
    pub fn identity(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_gap = (lhs - rhs).abs();
        let rel_gap = abs_gap / 1f64.max(lhs.abs()).max(rhs.abs());
        IdentityReport {
            name: name.to_string(),
            kind: CheckKind::Identity,
            lhs,
            rhs,
            abs_gap,
            rel_gap,
            tolerance,
            satisfied: rel_gap <= tolerance,
            defect: None,
        }
    }

    pub fn inequality(name: &str, lhs: f64, rhs: f64) -> Self {
        let mut r = Self::identity(name, lhs, rhs, INEQUALITY_SLACK);
        r.kind = CheckKind::Inequality;
        r.satisfied = lhs <= rhs + INEQUALITY_SLACK * 1f64.max(rhs.abs());
        r.defect = Some(rhs - lhs);
        r
    }
}

/// Grid fine enough to integrate the Neumann trace of `expansion` to near machine precision.
pub fn quadrature_grid(domain: &StarDomain, expansion: &ExteriorExpansion) -> Result<BoundaryGrid> {
    let ns = expansion.sources.len();
    let n = if domain.dimension() == 2 {
        (4 * ns).max(512).max(32 * (domain.degree() + 1))
    } else {
        (2 * ns).max(160).max(16 * (domain.degree() + 1))
    };
    BoundaryGrid::new(domain, n)
}

fn geometry_grid(domain: &StarDomain) -> Result<BoundaryGrid> {
    let n = if domain.dimension() == 2 {
        512.max(32 * (domain.degree() + 1))
    } else {
        160.max(16 * (domain.degree() + 1))
    };
    BoundaryGrid::new(domain, n)
}

fn trace_on(
    domain: &StarDomain,
    expansion: &ExteriorExpansion,
) -> Result<(BoundaryGrid, Vec<f64>)> {
    let g = quadrature_grid(domain, expansion)?;
    let dn = neumann_trace(expansion, &g)?;
    Ok((g, dn))
}

/// ∫|∇u|² = -∫_Σ ∂_ν u dS (N = 3).
pub fn energy_identity(
    expansion: &ExteriorExpansion,
    domain: &StarDomain,
) -> Result<IdentityReport> {
    let lhs = dirichlet_energy(expansion, domain)?;
    let (g, dn) = trace_on(domain, expansion)?;
    Ok(IdentityReport::identity(
        "energy",
        lhs,
        -g.integrate(&dn),
        1e-7,
    ))
}

/// ∫(x·ν)(∂_ν u)² dS = -(N-2)∫∂_ν u dS for N ≥ 3 and = 2π for N = 2.
pub fn pohozaev(expansion: &ExteriorExpansion, domain: &StarDomain) -> Result<IdentityReport> {
    let (g, dn) = trace_on(domain, expansion)?;
    let xn = g.support();
    let f: Vec<f64> = dn.iter().zip(&xn).map(|(d, s)| s * d * d).collect();
    let lhs = g.integrate(&f);
    let rhs = if domain.dimension() == 2 {
        2.0 * PI
    } else {
        -(domain.dimension() as f64 - 2.0) * g.integrate(&dn)
    };
    Ok(IdentityReport::identity("pohozaev", lhs, rhs, 1e-7))
}

/// ‖∂_ν u‖_p ≤ ((N-2)/(N-1))‖H‖_p on Σ, admissible for p ≥ 2 - 1/(N-1).
pub fn am_inequality(
    expansion: &ExteriorExpansion,
    domain: &StarDomain,
    p: f64,
) -> Result<IdentityReport> {
    let n = domain.dimension();
    if n < 3 {
        return Err(Error::UnsupportedDimension {
            dimension: n,
            operation: "boundary Agostiniani–Mazzieri inequality",
        });
    }
    let threshold = 2.0 - 1.0 / (n as f64 - 1.0);
    if !(p >= threshold) {
        return Err(Error::InadmissibleExponent { p, threshold });
    }
    let (g, dn) = trace_on(domain, expansion)?;
    let lhs = g.lp_norm(&dn, p);
    let rhs = (n as f64 - 2.0) / (n as f64 - 1.0) * g.lp_norm(&g.curvature_mean, p);
    Ok(IdentityReport::inequality("am_inequality", lhs, rhs))
}

fn check_unit_volume(domain: &StarDomain) -> Result<()> {
    let target = unit_ball_volume(domain.dimension());
    let volume = domain.volume();
    if (volume - target).abs() > 1e-10 * target {
        return Err(Error::VolumeNotNormalized { volume, target });
    }
    Ok(())
}

/// The defect combination evaluated two ways on a unit-volume domain (N ≥ 3):
/// lhs from the trace-free moment, ∫H and |Σ|; rhs as ∫(x·ν)q² + (N-2)∫q with
/// q = -(Γ/(N-1))H + λ. They agree on every domain; both vanish on solutions.
pub fn defect_identity(domain: &StarDomain, gamma: f64) -> Result<IdentityReport> {
    let n = domain.dimension();
    if n < 3 {
        return Err(Error::UnsupportedDimension {
            dimension: n,
            operation: "defect identity",
        });
    }
    check_unit_volume(domain)?;
    let nf = n as f64;
    let lambda = gamma - (nf - 2.0);
    let g = geometry_grid(domain)?;
    let m = g.minkowski_moments();
    let int_h = g.integrate(&g.curvature_mean);
    let area = g.total_weight();
    let sphere = unit_sphere_measure(n);
    let path_a = gamma * gamma / ((nf - 1.0) * (nf - 2.0)) * m.ma
        + gamma * lambda / (nf - 1.0) * int_h
        - lambda * (2.0 * gamma - (nf - 2.0)) * area
        + lambda * lambda * sphere;
    let q: Vec<f64> = g
        .curvature_mean
        .iter()
        .map(|h| -gamma / (nf - 1.0) * h + lambda)
        .collect();
    let xn = g.support();
    let q2: Vec<f64> = q.iter().zip(&xn).map(|(q, s)| s * q * q).collect();
    let path_b = g.integrate(&q2) + (nf - 2.0) * g.integrate(&q);
    Ok(IdentityReport::identity(
        "defect_identity",
        path_a,
        path_b,
        1e-9,
    ))
}

/// Minkowski formulas and the weighted Cauchy–Schwarz bound, from geometry alone.
pub fn minkowski_reports(domain: &StarDomain) -> Result<Vec<IdentityReport>> {
    let n = domain.dimension();
    let nf = n as f64;
    let g = geometry_grid(domain)?;
    let m = g.minkowski_moments();
    let area = g.total_weight();
    let volume = domain.volume();
    let mut out = vec![IdentityReport::identity(
        "minkowski0",
        m.m0,
        nf * volume,
        1e-8,
    )];
    if n == 2 {
        let xn = g.support();
        let f: Vec<f64> = xn
            .iter()
            .zip(&g.curvature_normalized)
            .map(|(s, h)| -s * h)
            .collect();
        out.push(IdentityReport::identity(
            "minkowski1",
            g.integrate(&f),
            area,
            1e-8,
        ));
    } else {
        let int_h = g.integrate(&g.curvature_mean);
        out.push(IdentityReport::identity(
            "minkowski1",
            m.m1,
            (nf - 1.0) * area,
            1e-8,
        ));
        out.push(IdentityReport::identity(
            "minkowski2",
            m.m2,
            (nf - 1.0) * int_h + (nf - 1.0) / (nf - 2.0) * m.ma,
            1e-8,
        ));
        out.push(IdentityReport::inequality(
            "weighted_cauchy_schwarz",
            (nf - 2.0) * ((nf - 1.0) * area * area / (nf * volume) - int_h),
            m.ma,
        ));
    }
    Ok(out)
}

/// ∫_Σ ∂_ν u dS = -2π (N = 2).
pub fn planar_flux(expansion: &ExteriorExpansion, domain: &StarDomain) -> Result<IdentityReport> {
    if domain.dimension() != 2 {
        return Err(Error::UnsupportedDimension {
            dimension: domain.dimension(),
            operation: "planar flux",
        });
    }
    let (g, dn) = trace_on(domain, expansion)?;
    Ok(IdentityReport::identity(
        "planar_flux",
        g.integrate(&dn),
        -2.0 * PI,
        1e-8,
    ))
}

/// (Γ - 1)|∂Ω| = 2π(Γχ(Ω) - 1).
pub fn planar_topological(
    gamma: f64,
    euler_characteristic: i32,
    perimeter: f64,
) -> Result<IdentityReport> {
    if !(perimeter > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "perimeter must be positive, got {perimeter}"
        )));
    }
    Ok(IdentityReport::identity(
        "planar_topological",
        (gamma - 1.0) * perimeter,
        2.0 * PI * (gamma * euler_characteristic as f64 - 1.0),
        1e-12,
    ))
}

/// Intermediate quantities of the rigidity argument for Γ > N - 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityChain {
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub lambda: f64,
    pub surface_measure: f64,
    pub h_l2: f64,
    pub dn_l2: f64,
    pub integral_h: f64,
    pub tracefree_moment: f64,
    pub factored_product: f64,
    /// Each step as lhs ≤ rhs. Diagnostic only: the steps are implications of the
    /// overdetermined condition and need not hold elsewhere.
    pub steps: Vec<IdentityReport>,
}

pub fn rigidity_chain(
    expansion: &ExteriorExpansion,
    domain: &StarDomain,
    gamma: f64,
) -> Result<RigidityChain> {
    let n = domain.dimension();
    if n < 3 {
        return Err(Error::UnsupportedDimension {
            dimension: n,
            operation: "rigidity chain",
        });
    }
    let nf = n as f64;
    let lambda = gamma - (nf - 2.0);
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "the rigidity chain needs Γ > N - 2, got Γ = {gamma}"
        )));
    }
    let (g, dn) = trace_on(domain, expansion)?;
    let area = g.total_weight();
    let sphere = unit_sphere_measure(n);
    let h_l2 = g.lp_norm(&g.curvature_mean, 2.0);
    let dn_l2 = g.lp_norm(&dn, 2.0);
    let q: Vec<f64> = g
        .curvature_mean
        .iter()
        .map(|h| gamma / (nf - 1.0) * h - lambda)
        .collect();
    let q_l2 = g.lp_norm(&q, 2.0);
    let integral_h = g.integrate(&g.curvature_mean);
    let m = g.minkowski_moments();
    let volume = domain.volume();
    let factored_product =
        (area - sphere) / sphere * (gamma * gamma * area - lambda * lambda * sphere);
    let steps = vec![
        IdentityReport::inequality("am_bound", dn_l2, (nf - 2.0) / (nf - 1.0) * h_l2),
        IdentityReport::inequality(
            "overdetermined_am_bound",
            q_l2,
            (nf - 2.0) / (nf - 1.0) * h_l2,
        ),
        IdentityReport::inequality(
            "triangle",
            gamma / (nf - 1.0) * h_l2 - lambda * area.sqrt(),
            q_l2,
        ),
        IdentityReport::inequality("h_l2_bound", h_l2, (nf - 1.0) * area.sqrt()),
        IdentityReport::inequality("holder", integral_h, area.sqrt() * h_l2),
        IdentityReport::inequality("mean_curvature_bound", integral_h, (nf - 1.0) * area),
        IdentityReport::inequality(
            "weighted_cauchy_schwarz",
            (nf - 2.0) * ((nf - 1.0) * area * area / (nf * volume) - integral_h),
            m.ma,
        ),
        IdentityReport::inequality("factored_product", factored_product, 0.0),
        IdentityReport::inequality("isoperimetric", sphere, area),
        IdentityReport::inequality(
            "positivity",
            0.0,
            (gamma * gamma - lambda * lambda) * sphere,
        ),
    ];
    Ok(RigidityChain {
        gamma,
        lambda,
        surface_measure: area,
        h_l2,
        dn_l2,
        integral_h,
        tracefree_moment: m.ma,
        factored_product,
        steps,
    })
}

/// All identity reports for one domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySuite {
    pub domain: StarDomain,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub fit_residual: f64,
    pub reports: Vec<IdentityReport>,
}

impl IdentitySuite {
    pub fn all_satisfied(&self) -> bool {
        self.reports.iter().all(|r| r.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityReport> {
        self.reports.iter().find(|r| r.name == name)
    }
}

/// Solve the capacitary problem on `domain` and evaluate every applicable identity.
/// The defect identity is included for N = 3 when |Ω| = ω_N.
pub fn identity_suite(
    domain: &StarDomain,
    gamma: f64,
    solver: &SolverOptions,
) -> Result<IdentitySuite> {
    let e = solve_dirichlet_with(domain, solver)?;
    identity_suite_with(domain, &e, gamma)
}

pub fn identity_suite_with(
    domain: &StarDomain,
    expansion: &ExteriorExpansion,
    gamma: f64,
) -> Result<IdentitySuite> {
    let mut reports = minkowski_reports(domain)?;
    reports.push(pohozaev(expansion, domain)?);
    if domain.dimension() == 2 {
        reports.push(planar_flux(expansion, domain)?);
    } else {
        reports.push(energy_identity(expansion, domain)?);
        reports.push(am_inequality(expansion, domain, 2.0)?);
        if check_unit_volume(domain).is_ok() {
            reports.push(defect_identity(domain, gamma)?);
        }
    }
    Ok(IdentitySuite {
        domain: domain.clone(),
        gamma,
        fit_residual: expansion.fit_residual,
        reports,
    })
}

/// One CSV row per identity per domain.
pub fn write_suite_csv<W: Write>(suites: &[(String, IdentitySuite)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "domain",
        "identity",
        "kind",
        "lhs",
        "rhs",
        "abs_gap",
        "rel_gap",
        "tolerance",
        "satisfied",
    ])?;
    for (id, s) in suites {
        for r in &s.reports {
            let kind = match r.kind {
                CheckKind::Identity => "identity",
                CheckKind::Inequality => "inequality",
            };
            w.write_record([
                id.clone(),
                r.name.clone(),
                kind.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.abs_gap.to_string(),
                r.rel_gap.to_string(),
                r.tolerance.to_string(),
                r.satisfied.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
