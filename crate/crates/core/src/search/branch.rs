use std::io::Write;

use serde::{Deserialize, Serialize};

use super::lm::levenberg_marquardt;
use super::solve::{residual_nodes, weighted_residual, SolveOptions};
use crate::error::{Error, Result};
use crate::geometry::StarDomain;
use crate::special::unit_ball_volume;
use crate::spectrum::bifurcation_value;

/// Whether the continuation system carries the |Ω| = ω_N row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeHandling {
    #[default]
    Free,
    Enforced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    /// Coefficient of the mode-ℓ basis function.
    pub amplitude: f64,
    pub domain: StarDomain,
    pub residual_norm: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub dimension: usize,
    pub mode: usize,
    pub volume_handling: VolumeHandling,
    pub points: Vec<BranchPoint>,
    /// Why the branch stopped before the requested number of steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

const MAX_HALVINGS: usize = 3;

/// Coefficient slots of ℓ-fold symmetric shapes: the mean radius and cos(kℓθ) in the plane;
/// for N = 3 the even modes when ℓ is even, every mode but the translation mode otherwise.
fn symmetric_slots(dimension: usize, mode: usize, top: usize) -> Vec<usize> {
    let mut s = vec![0];
    if dimension == 2 {
        s.extend((mode..=top).step_by(mode).map(|m| 2 * m - 1));
    } else if mode % 2 == 0 {
        s.extend((2..=top).step_by(2));
    } else {
        s.extend(2..=top);
    }
    s
}

fn amplitude_slot(dimension: usize, mode: usize) -> usize {
    if dimension == 2 {
        2 * mode - 1
    } else {
        mode
    }
}

/// Pseudo-arclength continuation of the mode-ℓ branch bifurcating from the unit ball at
/// Γ_ℓ, with the volume left free.
pub fn continue_branch(
    dimension: usize,
    mode: usize,
    steps: usize,
    ds: f64,
    opts: &SolveOptions,
) -> Result<Branch> {
    continue_branch_with(dimension, mode, steps, ds, opts, VolumeHandling::Free)
}

pub fn continue_branch_with(
    dimension: usize,
    mode: usize,
    steps: usize,
    ds: f64,
    opts: &SolveOptions,
    volume_handling: VolumeHandling,
) -> Result<Branch> {
    opts.validate()?;
    if !(dimension == 2 || dimension == 3) {
        return Err(Error::UnsupportedDimension {
            dimension,
            operation: "branch continuation",
        });
    }
    if mode < 2 {
        return Err(if mode == 1 {
            Error::TranslationMode
        } else {
            Error::InvalidArgument("continuation needs l >= 2".into())
        });
    }
    if !(ds > 0.0 && ds <= 0.05) {
        return Err(Error::InvalidArgument(format!(
            "ds must lie in (0, 0.05], got {ds}"
        )));
    }
    let gamma0 = bifurcation_value(dimension, mode)?;
    let top = opts.shape_modes.max(8 * mode);
    let slots = symmetric_slots(dimension, mode, top);
    let ball = StarDomain::unit_ball(dimension);
    let base = ball.padded_coefficients(top);
    let solver = opts.solver();
    let nodes = residual_nodes(dimension, top);
    let target = unit_ball_volume(dimension);
    let lead = slots
        .iter()
        .position(|&s| s == amplitude_slot(dimension, mode))
        .expect("mode slot present");

    // y = (Γ, shape coefficients on the symmetric slots)
    let build = |y: &[f64]| -> Option<StarDomain> {
        let mut c = base.clone();
        for (s, v) in slots.iter().zip(&y[1..]) {
            c[*s] = *v;
        }
        ball.with_coefficients(c).ok()
    };
    let condition = |y: &[f64]| -> Option<(Vec<f64>, StarDomain)> {
        let d = build(y)?;
        let (mut r, _) = weighted_residual(&d, y[0], &solver, nodes)?;
        if volume_handling == VolumeHandling::Enforced {
            r.push(opts.volume_weight * (d.volume() - target));
        }
        Some((r, d))
    };
    let point = |y: &[f64]| -> Option<BranchPoint> {
        let (r, d) = condition(y)?;
        Some(BranchPoint {
            gamma: y[0],
            amplitude: y[1 + lead],
            residual_norm: r.iter().map(|v| v * v).sum::<f64>().sqrt(),
            volume: d.volume(),
            domain: d,
        })
    };

    let mut y: Vec<f64> = std::iter::once(gamma0)
        .chain(slots.iter().map(|s| base[*s]))
        .collect();
    let mut tangent = vec![0.0; y.len()];
    tangent[1 + lead] = 1.0;
    let mut points =
        vec![point(&y).ok_or_else(|| Error::InvalidArgument("ball is inadmissible".into()))?];
    let mut diagnostic = None;

    'steps: for _ in 0..steps {
        let mut h = ds;
        for _ in 0..=MAX_HALVINGS {
            let anchor = y.clone();
            let t = tangent.clone();
            let predicted: Vec<f64> = anchor.iter().zip(&t).map(|(a, d)| a + h * d).collect();
            let system = |z: &[f64]| -> Option<Vec<f64>> {
                let (mut r, _) = condition(z)?;
                let arc: f64 = z
                    .iter()
                    .zip(&anchor)
                    .zip(&t)
                    .map(|((a, b), d)| (a - b) * d)
                    .sum();
                r.push(arc - h);
                Some(r)
            };
            let out = levenberg_marquardt(system, predicted, &opts.lm());
            if out.converged {
                let Some(p) = point(&out.x) else { break };
                let chord: Vec<f64> = out.x.iter().zip(&y).map(|(a, b)| a - b).collect();
                let len = chord.iter().map(|v| v * v).sum::<f64>().sqrt();
                tangent = chord.iter().map(|v| v / len).collect();
                y = out.x;
                points.push(p);
                continue 'steps;
            }
            diagnostic = out.diagnostic;
            h *= 0.5;
        }
        diagnostic = Some(format!(
            "corrector failed after {MAX_HALVINGS} step halvings at point {}: {}",
            points.len(),
            diagnostic.unwrap_or_else(|| "no convergence".into())
        ));
        break;
    }
    Ok(Branch {
        dimension,
        mode,
        volume_handling,
        points,
        diagnostic,
    })
}

/// CSV: `Gamma,amplitude,residual_norm,volume,coefficients` (coefficients space-separated).
pub fn write_branch_csv<W: Write>(branch: &Branch, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "Gamma",
        "amplitude",
        "residual_norm",
        "volume",
        "coefficients",
    ])?;
    for p in &branch.points {
        let c: Vec<String> = p
            .domain
            .coefficients()
            .iter()
            .map(|v| v.to_string())
            .collect();
        w.write_record([
            p.gamma.to_string(),
            p.amplitude.to_string(),
            p.residual_norm.to_string(),
            p.volume.to_string(),
            c.join(" "),
        ])?;
    }
    w.flush()?;
    Ok(())
}
