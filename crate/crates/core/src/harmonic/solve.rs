use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{kernel, ExteriorExpansion, Source};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, StarDomain};
use crate::special::legendre;

/// Fits with a verification residual above this are returned with a warning.
pub const ACCEPT_RESIDUAL: f64 = 1e-9;
/// Fits with a verification residual above this are rejected.
pub const REJECT_RESIDUAL: f64 = 1e-6;
const CONDITION_WARNING: f64 = 1e12;
const SOURCE_LADDER: [usize; 6] = [64, 128, 192, 256, 384, 512];
const HYBRID_DEGREE: usize = 8;

/// Knobs of the exterior Dirichlet solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Highest multipole mode K (N = 2) or L (N = 3).
    pub truncation: usize,
    /// Collocation nodes on Σ; 0 picks twice the number of unknowns.
    pub collocation_count: usize,
    /// Upper bound on interior sources added when the multipole series alone is not enough.
    pub max_sources: usize,
    /// Verification residual at which enrichment stops.
    pub fit_target: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            truncation: 24,
            collocation_count: 0,
            max_sources: 512,
            fit_target: 1e-11,
        }
    }
}

/// Capacitary potential of `domain`: u = 1 on Σ, u → 0 (N = 3) or u + log|x| = O(1) (N = 2).
pub fn solve_dirichlet(
    domain: &StarDomain,
    truncation: usize,
    collocation_count: usize,
) -> Result<ExteriorExpansion> {
    let opts = SolverOptions {
        truncation,
        collocation_count,
        ..SolverOptions::default()
    };
    solve_dirichlet_with(domain, &opts)
}

pub fn solve_dirichlet_with(
    domain: &StarDomain,
    opts: &SolverOptions,
) -> Result<ExteriorExpansion> {
    let log_coefficient = if domain.dimension() == 2 { -1.0 } else { 0.0 };
    solve_dirichlet_data(domain, &|_| 1.0, log_coefficient, opts)
}

/// Exterior harmonic function with boundary values `data` (absolute coordinates) and, for
/// N = 2, the prescribed logarithmic coefficient at infinity.
pub fn solve_dirichlet_data(
    domain: &StarDomain,
    data: &dyn Fn(&[f64; 3]) -> f64,
    log_coefficient: f64,
    opts: &SolverOptions,
) -> Result<ExteriorExpansion> {
    let dim = domain.dimension();
    if opts.truncation < 4 {
        return Err(Error::InvalidArgument(format!(
            "truncation must be at least 4, got {}",
            opts.truncation
        )));
    }
    let unknowns = multipole_unknowns(dim, opts.truncation);
    let collocation = if opts.collocation_count == 0 {
        (2 * unknowns).max(32)
    } else {
        opts.collocation_count
    };
    if collocation < 2 * unknowns {
        return Err(Error::InvalidArgument(format!(
            "{collocation} collocation nodes cannot determine {unknowns} unknowns (need twice as many)"
        )));
    }
    let mut best = fit(
        domain,
        data,
        log_coefficient,
        opts.truncation,
        &[],
        collocation,
    )?;
    if best.fit_residual > opts.fit_target {
        let offset = source_offset(domain)?;
        for &ns in SOURCE_LADDER.iter().filter(|&&n| n <= opts.max_sources) {
            let sources = place_sources(domain, ns, offset);
            let degree = opts.truncation.min(HYBRID_DEGREE);
            let cols = multipole_unknowns(dim, degree) + ns;
            let n = collocation.max(2 * cols);
            let e = fit(domain, data, log_coefficient, degree, &sources, n)?;
            log::debug!("sources {ns}: fit residual {:.3e}", e.fit_residual);
            if e.fit_residual < best.fit_residual {
                best = e;
            }
            if best.fit_residual <= opts.fit_target {
                break;
            }
        }
    }
    if best.fit_residual > REJECT_RESIDUAL {
        return Err(Error::Convergence {
            residual: best.fit_residual,
            limit: REJECT_RESIDUAL,
        });
    }
    if best.fit_residual > ACCEPT_RESIDUAL {
        let msg = format!(
            "fit residual {:.3e} above the acceptance level {ACCEPT_RESIDUAL:.0e}",
            best.fit_residual
        );
        log::warn!("{msg}");
        best.warning = Some(msg);
    }
    best.set_domain(domain);
    Ok(best)
}

fn multipole_unknowns(dimension: usize, degree: usize) -> usize {
    if dimension == 2 {
        2 * degree + 1
    } else {
        degree + 1
    }
}

/// Inward offset of the sources: a tenth of the mean radius, but never more than half the
/// smallest radius of curvature of a convex part of Σ.
fn source_offset(domain: &StarDomain) -> Result<f64> {
    let g = BoundaryGrid::new(domain, 1024)?;
    let kmax = (0..g.len())
        .map(|i| {
            if g.dimension == 2 {
                g.curvature_mean[i]
            } else {
                0.5 * g.curvature_mean[i] + (0.5 * g.tracefree_sq[i]).sqrt()
            }
        })
        .fold(0.0, f64::max);
    Ok((0.1 * domain.mean_radius()).min(0.5 / kmax))
}

/// Points at distance `offset` inside Σ along the inward normal, in frame coordinates.
fn place_sources(domain: &StarDomain, count: usize, offset: f64) -> Vec<[f64; 2]> {
    let g = if domain.dimension() == 2 {
        BoundaryGrid::with_offset(domain, count, 0.25)
    } else {
        BoundaryGrid::new(domain, count)
    }
    .expect("source count is at least 8");
    let c = domain.center();
    (0..g.len())
        .map(|i| {
            let p = g.positions[i];
            let n = g.normals[i];
            if domain.dimension() == 2 {
                [p[0] - c[0] - offset * n[0], p[1] - c[1] - offset * n[1]]
            } else {
                [p[0] - offset * n[0], p[2] - c[2] - offset * n[2]]
            }
        })
        .collect()
}

fn frame_of(domain: &StarDomain, x: &[f64; 3]) -> [f64; 2] {
    let c = domain.center();
    if domain.dimension() == 2 {
        [x[0] - c[0], x[1] - c[1]]
    } else {
        [x[0].hypot(x[1]), x[2] - c[2]]
    }
}

/// Basis row at a frame point: multipoles of degree ≤ `degree`, then sources.
fn basis_row(dim: usize, p: [f64; 2], degree: usize, sources: &[[f64; 2]], row: &mut [f64]) {
    let r = p[0].hypot(p[1]);
    let mut j = 0;
    if dim == 2 {
        let t = p[1].atan2(p[0]);
        row[0] = 1.0;
        j = 1;
        let mut rk = 1.0;
        for k in 1..=degree {
            rk /= r;
            let (sn, cs) = (k as f64 * t).sin_cos();
            row[j] = rk * cs;
            row[j + 1] = rk * sn;
            j += 2;
        }
        for s in sources {
            row[j] = kernel::log_value(p, *s);
            j += 1;
        }
    } else {
        let pl = legendre(degree, p[1] / r);
        let mut rl = 1.0 / r;
        for p in pl {
            row[j] = rl * p;
            rl /= r;
            j += 1;
        }
        for s in sources {
            row[j] = kernel::ring_value(p, *s);
            j += 1;
        }
    }
}

fn fit(
    domain: &StarDomain,
    data: &dyn Fn(&[f64; 3]) -> f64,
    log_coefficient: f64,
    degree: usize,
    sources: &[[f64; 2]],
    collocation: usize,
) -> Result<ExteriorExpansion> {
    let dim = domain.dimension();
    let grid = BoundaryGrid::new(domain, collocation)?;
    let ncols = multipole_unknowns(dim, degree) + sources.len();
    let mut a = DMatrix::<f64>::zeros(grid.len(), ncols);
    let mut b = DVector::<f64>::zeros(grid.len());
    let mut row = vec![0.0; ncols];
    for (i, x) in grid.positions.iter().enumerate() {
        let p = frame_of(domain, x);
        basis_row(dim, p, degree, sources, &mut row);
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = *v;
        }
        b[i] = data(x);
        if dim == 2 {
            b[i] -= log_coefficient * p[0].hypot(p[1]).ln();
        }
    }
    let (coef, condition) = least_squares(a, b);

    let mut e = ExteriorExpansion::new(dim, domain.center().to_vec());
    let mut j = 0;
    if dim == 2 {
        e.log_coefficient = log_coefficient;
        e.constant_term = coef[0];
        j = 1;
    }
    let nm = multipole_unknowns(dim, degree) - j;
    e.decay = coef.as_slice()[j..j + nm].to_vec();
    e.sources = sources
        .iter()
        .zip(&coef.as_slice()[j + nm..])
        .map(|(p, s)| Source {
            position: *p,
            strength: *s,
        })
        .collect();

    let check = if dim == 2 {
        BoundaryGrid::with_offset(domain, 2 * collocation, 0.5)?
    } else {
        BoundaryGrid::new(domain, 2 * collocation)?
    };
    e.fit_residual = check
        .positions
        .iter()
        .map(|x| (e.value(x) - data(x)).abs())
        .fold(0.0, f64::max);
    if condition > CONDITION_WARNING {
        e.warning = Some(format!("least-squares condition estimate {condition:.2e}"));
    }
    Ok(e)
}

/// Column-scaled least squares by Householder QR; falls back to a truncated SVD when the
/// triangular factor is numerically singular. Returns the solution and a condition estimate.
fn least_squares(mut a: DMatrix<f64>, b: DVector<f64>) -> (DVector<f64>, f64) {
    let scale: Vec<f64> = a
        .column_iter()
        .map(|c| {
            let n = c.norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    for (j, s) in scale.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = r.diagonal().iter().map(|v| v.abs()).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = dmax / dmin;
    let mut x = if condition < 1e13 {
        let qtb = qr.q().transpose() * &b;
        r.solve_upper_triangular(&qtb)
    } else {
        None
    }
    .unwrap_or_else(|| {
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        svd.solve(&b, 1e-14 * smax)
            .expect("SVD factors were computed")
    });
    for (j, s) in scale.iter().enumerate() {
        x[j] /= s;
    }
    (x, condition)
}
