use std::f64::consts::PI;

use super::domain::StarDomain;
use crate::error::{Error, Result};
use crate::special::{gauss_legendre, legendre, uniform_angles};

const MAX_SAMPLES: usize = 4096;
// Root-finding noise puts a floor of a few 1e-14 on high projected modes.
const TAIL: f64 = 1e-12;
const TRIM: f64 = 1e-13;
const RECENTER_TOL: f64 = 1e-13;

/// Re-express the same point set as a radial graph over `center + offset`.
///
/// Axisymmetric domains only admit offsets along the symmetry axis.
pub fn translate(domain: &StarDomain, offset: &[f64]) -> Result<StarDomain> {
    let n = domain.dimension();
    if offset.len() != n {
        return Err(Error::InvalidArgument(format!(
            "offset has {} components, expected {n}",
            offset.len()
        )));
    }
    if offset.iter().all(|v| *v == 0.0) {
        return Ok(domain.clone());
    }
    if n == 3 && (offset[0] != 0.0 || offset[1] != 0.0) {
        return Err(Error::InvalidArgument(
            "axisymmetric domains can only be translated along the z-axis".into(),
        ));
    }
    // In the graph's own polar frame the new center sits at `v`.
    let v = if n == 2 {
        [offset[0], offset[1]]
    } else {
        [0.0, offset[2]]
    };
    check_star_shaped(domain, v)?;
    let new_center: Vec<f64> = domain
        .center()
        .iter()
        .zip(offset)
        .map(|(c, o)| c + o)
        .collect();
    let coefficients = if n == 2 {
        project_planar(domain, v)
    } else {
        project_axisymmetric(domain, v)
    };
    StarDomain::new(n, coefficients, new_center)
}

/// Translate to the center that annihilates the mode-1 coefficients.
pub fn recenter(domain: &StarDomain) -> Result<StarDomain> {
    let mut d = domain.clone();
    for _ in 0..60 {
        let c = d.coefficients();
        let shift = match d.dimension() {
            2 if c.len() >= 3 => vec![c[1], c[2]],
            3 if c.len() >= 2 => vec![0.0, 0.0, c[1]],
            _ => return Ok(d),
        };
        if shift.iter().all(|s| s.abs() <= RECENTER_TOL) {
            return Ok(d);
        }
        d = translate(&d, &shift)?;
    }
    Err(Error::Convergence {
        residual: mode_one_size(&d),
        limit: RECENTER_TOL,
    })
}

fn mode_one_size(d: &StarDomain) -> f64 {
    let c = d.coefficients();
    match d.dimension() {
        2 => c.get(1).unwrap_or(&0.0).hypot(*c.get(2).unwrap_or(&0.0)),
        _ => c.get(1).map_or(0.0, |v| v.abs()),
    }
}

/// The new center must see every boundary point with (x - c')·ν > 0.
fn check_star_shaped(domain: &StarDomain, v: [f64; 2]) -> Result<()> {
    let m = 2048.max(32 * domain.degree());
    let params: Vec<f64> = if domain.dimension() == 2 {
        uniform_angles(m, 0.0)
    } else {
        (0..=m).map(|j| PI * j as f64 / m as f64).collect()
    };
    for t in params {
        let s = domain.radial(t);
        let (p, nrm) = frame_point(domain.dimension(), t, s.r, s.dr);
        let support = (p[0] - v[0]) * nrm[0] + (p[1] - v[1]) * nrm[1];
        if support <= 1e-12 * s.r {
            return Err(Error::InvalidDomain(
                "translated center does not see the boundary as a radial graph".into(),
            ));
        }
    }
    Ok(())
}

/// Point and unnormalized outer normal in the graph's planar frame:
/// (x, y) for N = 2, (ρ, z) for N = 3.
fn frame_point(dimension: usize, t: f64, r: f64, dr: f64) -> ([f64; 2], [f64; 2]) {
    let (sn, cs) = t.sin_cos();
    if dimension == 2 {
        ([r * cs, r * sn], [r * cs + dr * sn, r * sn - dr * cs])
    } else {
        ([r * sn, r * cs], [r * sn - dr * cs, r * cs + dr * sn])
    }
}

/// Distance from `v` to Σ along the unit direction `dir` (frame coordinates).
fn ray_hit(domain: &StarDomain, v: [f64; 2], dir: [f64; 2]) -> f64 {
    let planar = domain.dimension() == 2;
    let g = |s: f64| {
        let x = v[0] + s * dir[0];
        let y = v[1] + s * dir[1];
        let rho = x.hypot(y);
        let t = if planar { y.atan2(x) } else { x.atan2(y) };
        rho - domain.radial(t).r
    };
    let mut lo = 0.0;
    let mut hi = domain.max_radius_bound() + v[0].hypot(v[1]);
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    // Bisection to a bracket, then secant polish.
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (mut a, mut b) = (lo, hi);
    let (mut ga, mut gb) = (g(a), g(b));
    for _ in 0..20 {
        if gb == ga {
            break;
        }
        let c = b - gb * (b - a) / (gb - ga);
        a = b;
        ga = gb;
        b = c;
        gb = g(b);
        if gb.abs() <= 1e-16 * b {
            break;
        }
    }
    b
}

fn project_planar(domain: &StarDomain, v: [f64; 2]) -> Vec<f64> {
    let mut m = 64.max(8 * domain.degree().next_power_of_two());
    loop {
        let samples: Vec<f64> = uniform_angles(m, 0.0)
            .into_iter()
            .map(|t| ray_hit(domain, v, [t.cos(), t.sin()]))
            .collect();
        let kmax = m / 2 - 1;
        let mut c = vec![0.0; 2 * kmax + 1];
        c[0] = samples.iter().sum::<f64>() / m as f64;
        for k in 1..=kmax {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, r) in samples.iter().enumerate() {
                let (sn, cs) = (2.0 * PI * (k * j) as f64 / m as f64).sin_cos();
                a += r * cs;
                b += r * sn;
            }
            c[2 * k - 1] = 2.0 * a / m as f64;
            c[2 * k] = 2.0 * b / m as f64;
        }
        let tail = c[(3 * c.len()) / 4..]
            .iter()
            .fold(0.0_f64, |a, b| a.max(b.abs()));
        if tail <= TAIL * c[0] || m >= MAX_SAMPLES {
            return trim_planar(c);
        }
        m *= 2;
    }
}

fn project_axisymmetric(domain: &StarDomain, v: [f64; 2]) -> Vec<f64> {
    let mut m = 64.max(4 * domain.degree().next_power_of_two());
    loop {
        let (xs, ws) = gauss_legendre(m);
        let samples: Vec<f64> = xs
            .iter()
            .map(|&x| ray_hit(domain, v, [(1.0 - x * x).sqrt(), x]))
            .collect();
        let lmax = m / 2;
        let mut c = vec![0.0; lmax + 1];
        for ((x, w), r) in xs.iter().zip(&ws).zip(&samples) {
            let p = legendre(lmax, *x);
            for (l, cl) in c.iter_mut().enumerate() {
                *cl += w * r * p[l];
            }
        }
        for (l, cl) in c.iter_mut().enumerate() {
            *cl *= (2 * l + 1) as f64 / 2.0;
        }
        let tail = c[(3 * c.len()) / 4..]
            .iter()
            .fold(0.0_f64, |a, b| a.max(b.abs()));
        if tail <= TAIL * c[0] || m >= MAX_SAMPLES / 4 {
            return trim_axisymmetric(c);
        }
        m *= 2;
    }
}

fn trim_planar(mut c: Vec<f64>) -> Vec<f64> {
    let scale = c[0].abs();
    while c.len() > 1 {
        let n = c.len();
        if c[n - 1].abs().max(c[n - 2].abs()) <= TRIM * scale {
            c.truncate(n - 2);
        } else {
            break;
        }
    }
    c
}

fn trim_axisymmetric(mut c: Vec<f64>) -> Vec<f64> {
    let scale = c[0].abs();
    while c.len() > 1 && c[c.len() - 1].abs() <= TRIM * scale {
        c.pop();
    }
    c
}

impl StarDomain {
    /// Cheap upper bound on R from the coefficient magnitudes.
    fn max_radius_bound(&self) -> f64 {
        self.coefficients().iter().map(|c| c.abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hausdorff_planar(a: &StarDomain, b: &StarDomain) -> f64 {
        // Points of `a` are compared with the ray hit of `b` in the same direction from b's center.
        let n = 2000;
        let mut worst = 0.0_f64;
        for j in 0..n {
            let t = 2.0 * PI * (j as f64 + 0.37) / n as f64;
            let p = a.point(t);
            let dx = p[0] - b.center()[0];
            let dy = p[1] - b.center()[1];
            let rb = b.radial(dy.atan2(dx)).r;
            worst = worst.max((dx.hypot(dy) - rb).abs());
        }
        worst
    }

    #[test]
    fn zero_translation_is_identity() {
        let d = StarDomain::planar(vec![1.0, 0.0, 0.0, 0.1, 0.0]).unwrap();
        assert_eq!(translate(&d, &[0.0, 0.0]).unwrap(), d);
    }

    #[test]
    fn translated_circle_recenters_to_circle() {
        let d = translate(&StarDomain::unit_ball(2), &[0.3, 0.0]).unwrap();
        assert!((d.center()[0] - 0.3).abs() < 1e-15);
        assert!(d.coefficients()[1].abs() > 0.2);
        let back = recenter(&d).unwrap();
        let c = back.padded_coefficients(back.degree());
        assert!((c[0] - 1.0).abs() < 1e-10);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-10), "{c:?}");
        assert!(back.center()[0].abs() < 1e-10 && back.center()[1].abs() < 1e-10);
    }

    #[test]
    fn translation_keeps_point_set() {
        let d = StarDomain::planar(vec![1.0, 0.0, 0.0, 0.1, -0.05, 0.0, 0.03]).unwrap();
        let t = translate(&d, &[0.1, -0.05]).unwrap();
        assert!(hausdorff_planar(&d, &t) < 1e-12);
    }

    #[test]
    fn recenter_kills_mode_one() {
        let d = StarDomain::planar(vec![1.0, 0.05, 0.0]).unwrap();
        let r = recenter(&d).unwrap();
        assert!(r.coefficients()[1].abs() < 1e-10 && r.coefficients()[2].abs() < 1e-10);
        assert!(hausdorff_planar(&d, &r) < 1e-8);
        assert!(hausdorff_planar(&r, &d) < 1e-8);
    }

    #[test]
    fn axisymmetric_recenter() {
        let d = StarDomain::axisymmetric(vec![1.0, 0.04, 0.1]).unwrap();
        let r = recenter(&d).unwrap();
        assert!(r.coefficients()[1].abs() < 1e-10);
        assert!((r.volume() - d.volume()).abs() < 1e-11);
        let sphere = translate(&StarDomain::unit_ball(3), &[0.0, 0.0, -0.2]).unwrap();
        let back = recenter(&sphere).unwrap();
        assert!((back.coefficients()[0] - 1.0).abs() < 1e-10);
        assert!(back.coefficients()[1..].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn rejects_off_axis_and_non_graph_translations() {
        let s = StarDomain::unit_ball(3);
        assert!(translate(&s, &[0.1, 0.0, 0.0]).is_err());
        assert!(translate(&StarDomain::unit_ball(2), &[1.5, 0.0]).is_err());
    }
}
