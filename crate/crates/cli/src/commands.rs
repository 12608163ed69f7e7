use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::json;

use capshape::geometry::DomainFile;
use capshape::identities::{identity_suite, rigidity_chain, write_suite_csv};
use capshape::overdet::{
    compatibility_constant, conformal_scalars, normalize, solve_residual, ProblemData,
};
use capshape::report::{Defaults, Report, ReportHeader, Summary};
use capshape::search::{
    continue_branch_with, rigidity_sweep, solve_shape, write_branch_csv, write_sweep_csv,
};
use capshape::spectrum::{
    bifurcation_fraction, numeric_bifurcation_value, numeric_mode_eigenvalue,
};
use capshape::StarDomain;

use crate::args::{Cli, Command, NumericArgs};

const BALL_TOLERANCE: f64 = 1e-6;
const PLANAR_SPECTRUM_TOLERANCE: f64 = 1e-5;
const ROOT_TOLERANCE: f64 = 1e-6;

struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> anyhow::Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.written.push(path);
        Ok(BufWriter::new(f))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn report<T: Serialize>(
        &mut self,
        header: ReportHeader,
        results: T,
        summary: Summary,
    ) -> anyhow::Result<()> {
        let name = format!("{}.json", header.command);
        self.json(
            &name,
            &Report {
                header,
                results,
                summary,
            },
        )
    }

    /// Two whitespace-separated columns for external plotting.
    fn plot(
        &mut self,
        name: &str,
        columns: (&str, &str),
        rows: &[(f64, f64)],
    ) -> anyhow::Result<()> {
        let mut w = self.create(name)?;
        writeln!(w, "# {} {}", columns.0, columns.1)?;
        for (x, y) in rows {
            writeln!(w, "{x} {y}")?;
        }
        w.flush()?;
        Ok(())
    }
}

fn header(command: &str, numeric: &NumericArgs, options: serde_json::Value) -> ReportHeader {
    ReportHeader::new(
        command,
        Defaults::default(),
        json!({ "command": options, "numeric": numeric }),
    )
}

fn write_rows<R: AsRef<[u8]>>(w: impl Write, head: &[&str], rows: &[Vec<R>]) -> anyhow::Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(head)?;
    for r in rows {
        c.write_record(r)?;
    }
    c.flush()?;
    Ok(())
}

/// Γ for which the ball is the only solution claimed: every Γ in the plane, Γ ≤ 0 or
/// Γ ≥ N - 2 otherwise.
fn rigidity_regime(dimension: usize, gamma: f64) -> bool {
    dimension == 2 || gamma <= 0.0 || gamma >= dimension as f64 - 2.0
}

fn check_solver_dimension(dimension: usize) -> anyhow::Result<()> {
    if !(dimension == 2 || dimension == 3) {
        bail!("numerical commands support dimension 2 or 3, got {dimension}");
    }
    Ok(())
}

pub fn run(cli: &Cli) -> anyhow::Result<Summary> {
    let mut out = Output::new(&cli.out_dir)?;
    let numeric = &cli.numeric;
    let summary = match &cli.command {
        Command::Normalize {
            dimension,
            gamma,
            u0,
            alpha,
            r0,
        } => {
            let n = *dimension;
            if n >= 3 && u0.is_none() {
                bail!("--u0 is required for dimension {n}");
            }
            let data = ProblemData::new(n, u0.unwrap_or(0.0), *gamma, *r0, *alpha)?;
            let p = normalize(&data)?;
            let c0 = compatibility_constant(&data)?;
            let conformal = conformal_scalars(p.gamma, n).ok();
            let mut summary = Summary::default();
            let mut ball_residual = None;
            if n == 2 || n == 3 {
                let (_, _, r) =
                    solve_residual(&StarDomain::unit_ball(n), p.gamma, &numeric.solver(), 64)?;
                let m = r.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                summary.record(m <= 1e-10);
                ball_residual = Some(m);
            }
            println!("Gamma = {}", p.gamma);
            println!("C0 = {c0}");
            println!("lambda = {}", p.lambda());
            let rows = vec![
                vec!["Gamma".to_string(), p.gamma.to_string()],
                vec!["C0".into(), c0.to_string()],
                vec!["lambda".into(), p.lambda().to_string()],
                vec!["target_volume".into(), p.target_volume.to_string()],
            ];
            write_rows(out.create("normalize.csv")?, &["quantity", "value"], &rows)?;
            out.report(
                header(
                    "normalize",
                    numeric,
                    json!({ "dimension": n, "gamma": gamma, "u0": u0, "alpha": alpha, "R0": r0 }),
                ),
                json!({
                    "problem": data,
                    "normalized": p,
                    "C0": c0,
                    "lambda": p.lambda(),
                    "conformal": conformal,
                    "unit_ball_max_residual": ball_residual,
                }),
                summary,
            )?;
            summary
        }

        Command::Identities { domain, parameter } => {
            let d = domain.load()?;
            check_solver_dimension(d.dimension())?;
            let gamma = parameter.resolve(d.dimension())?;
            let suite = identity_suite(&d, gamma, &numeric.solver())?;
            let mut summary = Summary::default();
            for r in &suite.reports {
                summary.record(r.satisfied);
                let defect = r
                    .defect
                    .map(|v| format!(" defect {v:.3e}"))
                    .unwrap_or_default();
                println!(
                    "{:<26} {:<4} lhs {:>22.15e} rhs {:>22.15e} rel_gap {:.2e}{defect}",
                    r.name,
                    if r.satisfied { "ok" } else { "FAIL" },
                    r.lhs,
                    r.rhs,
                    r.rel_gap
                );
            }
            let chain = if d.dimension() == 3 {
                let e = capshape::harmonic::solve_dirichlet_with(&d, &numeric.solver())?;
                rigidity_chain(&e, &d, gamma).ok()
            } else {
                None
            };
            write_suite_csv(
                &[("domain".to_string(), suite.clone())],
                out.create("identities.csv")?,
            )?;
            out.report(
                header(
                    "identities",
                    numeric,
                    json!({ "domain": DomainFile::from(d.clone()), "Gamma": gamma }),
                ),
                json!({ "suite": suite, "rigidity_chain": chain }),
                summary,
            )?;
            summary
        }

        Command::Spectrum {
            dimension,
            modes,
            gammas,
            step,
        } => {
            let n = *dimension;
            check_solver_dimension(n)?;
            let mut summary = Summary::default();
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for &gamma in gammas {
                for &l in &modes.0 {
                    let m = numeric_mode_eigenvalue(n, gamma, l, *step)?;
                    let gap = m.analytic_value.map(|a| (m.numeric_value - a).abs());
                    if let Some(g) = gap {
                        summary.record(g <= PLANAR_SPECTRUM_TOLERANCE);
                    }
                    rows.push(vec![
                        n.to_string(),
                        l.to_string(),
                        gamma.to_string(),
                        m.analytic_value.map(|v| v.to_string()).unwrap_or_default(),
                        m.numeric_value.to_string(),
                        gap.map(|v| v.to_string()).unwrap_or_default(),
                    ]);
                    values.push(m);
                }
            }
            let mut roots = Vec::new();
            for &l in modes.0.iter().filter(|&&l| l != 1) {
                let (p, q) = bifurcation_fraction(n, l)?;
                let expected = p as f64 / q as f64;
                let root = numeric_bifurcation_value(n, l, *step)?;
                let gap = (root - expected).abs();
                summary.record(gap <= ROOT_TOLERANCE);
                println!("l = {l}: zero of the numeric eigenvalue at Γ = {root:.10} (closed form {p}/{q}, gap {gap:.1e})");
                roots.push(json!({ "mode": l, "numeric_root": root, "bifurcation_value": expected, "gap": gap }));
            }
            write_rows(
                out.create("spectrum.csv")?,
                &["N", "l", "Gamma", "analytic", "numeric", "gap"],
                &rows,
            )?;
            out.report(
                header(
                    "spectrum",
                    numeric,
                    json!({ "dimension": n, "modes": modes.0, "Gamma": gammas, "step": step }),
                ),
                json!({ "eigenvalues": values, "roots": roots }),
                summary,
            )?;
            summary
        }

        Command::Bifurcations { dimension, modes } => {
            let n = *dimension;
            let mut summary = Summary::default();
            let mut rows = Vec::new();
            let mut table = Vec::new();
            println!("{:>4}  {:>8}  {:>20}", "l", "Gamma_l", "value");
            for &l in &modes.0 {
                if l == 1 {
                    println!("{l:>4}  {:>8}  translation mode, no bifurcation", "-");
                    continue;
                }
                let (p, q) = bifurcation_fraction(n, l)?;
                let v = p as f64 / q as f64;
                summary.record(v.is_finite() && v > 0.0);
                let frac = if q == 1 {
                    p.to_string()
                } else {
                    format!("{p}/{q}")
                };
                println!("{l:>4}  {frac:>8}  {v:>20.17}");
                rows.push(vec![
                    n.to_string(),
                    l.to_string(),
                    p.to_string(),
                    q.to_string(),
                    v.to_string(),
                ]);
                table.push(json!({ "mode": l, "numerator": p, "denominator": q, "value": v }));
            }
            write_rows(
                out.create("bifurcations.csv")?,
                &["N", "l", "numerator", "denominator", "Gamma"],
                &rows,
            )?;
            out.report(
                header(
                    "bifurcations",
                    numeric,
                    json!({ "dimension": n, "modes": modes.0 }),
                ),
                table,
                summary,
            )?;
            summary
        }

        Command::Branch {
            dimension,
            mode,
            steps,
            ds,
            volume,
        } => {
            let n = *dimension;
            check_solver_dimension(n)?;
            let opts = numeric.search();
            let b = continue_branch_with(n, *mode, *steps, *ds, &opts, (*volume).into())?;
            // Slots the ℓ-fold symmetric shape space may occupy.
            let symmetric = |i: usize| match n {
                2 => i == 0 || (i % 2 == 1 && StarDomain::mode_of_index(2, i) % mode == 0),
                _ if mode % 2 == 0 => i % 2 == 0,
                _ => i != 1,
            };
            let mut summary = Summary::default();
            for p in b.points.iter().skip(1) {
                summary.record(p.residual_norm <= opts.residual_tolerance);
                let asym = p
                    .domain
                    .coefficients()
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| !symmetric(i))
                    .fold(0.0_f64, |a, (_, v)| a.max(v.abs()));
                summary.record(asym <= 1e-10);
            }
            for p in &b.points {
                println!(
                    "Gamma {:.10}  amplitude {:.6}  residual {:.2e}",
                    p.gamma, p.amplitude, p.residual_norm
                );
            }
            if let Some(d) = &b.diagnostic {
                println!("branch truncated: {d}");
            }
            write_branch_csv(&b, out.create("branch.csv")?)?;
            let plot: Vec<(f64, f64)> = b.points.iter().map(|p| (p.gamma, p.amplitude)).collect();
            out.plot("branch.dat", ("Gamma", "amplitude"), &plot)?;
            out.report(
                header(
                    "branch",
                    numeric,
                    json!({ "dimension": n, "mode": mode, "steps": steps, "ds": ds, "volume": b.volume_handling }),
                ),
                &b,
                summary,
            )?;
            summary
        }

        Command::Sweep {
            dimension,
            gammas,
            seeds,
        } => {
            let n = *dimension;
            check_solver_dimension(n)?;
            let rows = rigidity_sweep(n, gammas, *seeds, &numeric.search())?;
            let mut summary = Summary::default();
            let mut failed = 0;
            for r in &rows {
                match &r.report {
                    Some(rep) if rep.converged => {
                        if rigidity_regime(n, r.gamma) {
                            summary.record(rep.distance_to_ball <= BALL_TOLERANCE);
                        }
                        println!(
                            "Gamma {:<8} seed {:<3} converged  residual {:.2e}  distance_to_ball {:.2e}",
                            r.gamma, r.seed, rep.residual_norm, rep.distance_to_ball
                        );
                    }
                    Some(rep) => {
                        failed += 1;
                        println!(
                            "Gamma {:<8} seed {:<3} not converged ({})",
                            r.gamma,
                            r.seed,
                            rep.diagnostic.as_deref().unwrap_or("unknown")
                        );
                    }
                    None => {
                        failed += 1;
                        println!(
                            "Gamma {:<8} seed {:<3} error: {}",
                            r.gamma,
                            r.seed,
                            r.error.as_deref().unwrap_or("")
                        );
                    }
                }
            }
            summary.record(5 * failed <= rows.len());
            println!("{failed}/{} rows did not converge", rows.len());
            write_sweep_csv(&rows, out.create("sweep.csv")?)?;
            let plot: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| {
                    r.report
                        .as_ref()
                        .filter(|s| s.converged)
                        .map(|s| (r.gamma, s.distance_to_ball))
                })
                .collect();
            out.plot("sweep.dat", ("Gamma", "distance_to_ball"), &plot)?;
            out.report(
                header(
                    "sweep",
                    numeric,
                    json!({ "dimension": n, "Gamma": gammas, "seeds": seeds }),
                ),
                &rows,
                summary,
            )?;
            summary
        }

        Command::Solve { domain, parameter } => {
            let d = domain.load()?;
            let n = d.dimension();
            check_solver_dimension(n)?;
            let gamma = parameter.resolve(n)?;
            let rep = solve_shape(n, gamma, &d, &numeric.search())?;
            let mut summary = Summary::default();
            summary.record(rep.converged);
            if rep.converged && rigidity_regime(n, gamma) {
                summary.record(rep.distance_to_ball <= BALL_TOLERANCE);
            }
            println!(
                "converged {}  iterations {}  residual {:.2e}  volume_gap {:.2e}  distance_to_ball {:.2e}",
                rep.converged, rep.iterations, rep.residual_norm, rep.volume_gap, rep.distance_to_ball
            );
            out.json(
                "solve_domain.json",
                &DomainFile::from(rep.final_domain.clone()),
            )?;
            out.report(
                header(
                    "solve",
                    numeric,
                    json!({ "domain": DomainFile::from(d), "Gamma": gamma }),
                ),
                &rep,
                summary,
            )?;
            summary
        }
    };
    println!(
        "summary: {} passed, {} failed",
        summary.passed, summary.failed
    );
    for p in &out.written {
        println!("wrote {}", p.display());
    }
    Ok(summary)
}
