use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::random::{random_domain, RANDOM_AMPLITUDE};
use super::solve::{solve_shape, SolveOptions, SolveReport};
use crate::error::Result;

/// One (Γ, seed) row of a rigidity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub seed: u64,
    pub initial_amplitude: f64,
    pub report: Option<SolveReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn converged(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.converged)
    }
}

/// Solve from `seeds` random initial shapes at every Γ. Rows run in parallel and come back
/// ordered by (Γ, seed); row seeds are `opts.seed + k`.
pub fn rigidity_sweep(
    dimension: usize,
    gammas: &[f64],
    seeds: usize,
    opts: &SolveOptions,
) -> Result<Vec<SweepRow>> {
    opts.validate()?;
    let jobs: Vec<(f64, u64)> = gammas
        .iter()
        .flat_map(|&g| (0..seeds as u64).map(move |k| (g, k)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(gamma, k)| {
            let seed = opts.seed.wrapping_add(k);
            let init = random_domain(dimension, seed, RANDOM_AMPLITUDE);
            let initial_amplitude = init.as_ref().map_or(f64::NAN, |d| d.amplitude());
            match init.and_then(|d| solve_shape(dimension, gamma, &d, opts)) {
                Ok(report) => SweepRow {
                    gamma,
                    seed,
                    initial_amplitude,
                    report: Some(report),
                    error: None,
                },
                Err(e) => SweepRow {
                    gamma,
                    seed,
                    initial_amplitude,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// CSV: `Gamma,seed,converged,residual_norm,volume_gap,distance_to_ball,iterations`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "Gamma",
        "seed",
        "converged",
        "residual_norm",
        "volume_gap",
        "distance_to_ball",
        "iterations",
    ])?;
    for r in rows {
        let (res, gap, dist, it) = match &r.report {
            Some(s) => (
                s.residual_norm.to_string(),
                s.volume_gap.to_string(),
                s.distance_to_ball.to_string(),
                s.iterations.to_string(),
            ),
            None => ("NaN".into(), "NaN".into(), "NaN".into(), "0".into()),
        };
        w.write_record([
            r.gamma.to_string(),
            r.seed.to_string(),
            r.converged().to_string(),
            res,
            gap,
            dist,
            it,
        ])?;
    }
    w.flush()?;
    Ok(())
}
