use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use capshape::geometry::DomainFile;
use capshape::overdet::{normalize, ProblemData};
use capshape::search::{SolveOptions, VolumeHandling};
use capshape::{SolverOptions, StarDomain};

#[derive(Debug, Parser)]
#[command(
    name = "capshape",
    version,
    about = "Capacitary potentials and the overdetermined curvature condition on star-shaped domains"
)]
pub struct Cli {
    /// Directory for CSV, JSON and plot-data files.
    #[arg(
        long,
        global = true,
        env = "CAPSHAPE_OUT_DIR",
        default_value = "capshape-out"
    )]
    pub out_dir: PathBuf,

    #[command(flatten)]
    pub numeric: NumericArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NumericArgs {
    /// Multipole truncation of the exterior solver.
    #[arg(long, global = true, default_value_t = 24)]
    pub truncation: usize,
    /// Collocation nodes (0 picks twice the unknown count).
    #[arg(long, global = true, default_value_t = 0)]
    pub collocation: usize,
    /// Largest number of auxiliary sources the solver may add.
    #[arg(long, global = true, default_value_t = 512)]
    pub max_sources: usize,
    /// Target RMS Dirichlet mismatch of the exterior fit.
    #[arg(long, global = true, default_value_t = 1e-11)]
    pub fit_target: f64,
    #[arg(long, global = true, default_value_t = 60)]
    pub max_iterations: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub residual_tolerance: f64,
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub step_tolerance: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub step_damping: f64,
    #[arg(long, global = true, default_value_t = 10.0)]
    pub volume_weight: f64,
    #[arg(long, global = true, default_value_t = 8)]
    pub shape_modes: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl NumericArgs {
    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            truncation: self.truncation,
            collocation_count: self.collocation,
            max_sources: self.max_sources,
            fit_target: self.fit_target,
        }
    }

    pub fn search(&self) -> SolveOptions {
        SolveOptions {
            max_iterations: self.max_iterations,
            residual_tolerance: self.residual_tolerance,
            step_tolerance: self.step_tolerance,
            step_damping: self.step_damping,
            volume_weight: self.volume_weight,
            truncation: self.truncation,
            collocation_count: self.collocation,
            seed: self.seed,
            shape_modes: self.shape_modes,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized parameter Γ and the spherical compatibility constant C₀.
    Normalize {
        #[arg(long)]
        dimension: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real, conflicts_with = "alpha")]
        u0: Option<f64>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
        alpha: Option<f64>,
        #[arg(long = "R0", value_parser = parse_real)]
        r0: f64,
    },
    /// Integral identities and inequalities on one domain.
    Identities {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        parameter: ParameterArgs,
    },
    /// Numeric linearized eigenvalues at the ball against their closed forms.
    Spectrum {
        #[arg(long)]
        dimension: usize,
        /// Modes, as `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "0..8", value_parser = parse_modes)]
        modes: ModeList,
        #[arg(long = "Gamma", allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_real, default_value = "-1,0,1/3,1/2,1,2")]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Closed-form bifurcation values Γ_ℓ.
    Bifurcations {
        #[arg(long)]
        dimension: usize,
        #[arg(long, default_value = "2..6", value_parser = parse_modes)]
        modes: ModeList,
    },
    /// Pseudo-arclength continuation of the mode-ℓ branch.
    Branch {
        #[arg(long)]
        dimension: usize,
        #[arg(long)]
        mode: usize,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 0.01)]
        ds: f64,
        #[arg(long, value_enum, default_value_t = VolumeArg::Free)]
        volume: VolumeArg,
    },
    /// Shape solves from seeded random initial domains at each Γ.
    Sweep {
        #[arg(long)]
        dimension: usize,
        #[arg(long = "Gamma", allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_real, required = true)]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
    },
    /// One shape solve at fixed Γ.
    Solve {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        parameter: ParameterArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VolumeArg {
    Free,
    Enforced,
}

impl From<VolumeArg> for VolumeHandling {
    fn from(v: VolumeArg) -> Self {
        match v {
            VolumeArg::Free => VolumeHandling::Free,
            VolumeArg::Enforced => VolumeHandling::Enforced,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DomainArgs {
    /// Domain JSON file: {"dimension", "coefficients", "center"}.
    #[arg(long, conflicts_with = "coefficients")]
    pub domain: Option<PathBuf>,
    /// Inline radial coefficients, comma separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_real, requires = "dimension")]
    pub coefficients: Option<Vec<f64>>,
    #[arg(long)]
    pub dimension: Option<usize>,
}

impl DomainArgs {
    pub fn load(&self) -> anyhow::Result<StarDomain> {
        let d = match (&self.domain, &self.coefficients) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading domain file {}", path.display()))?;
                let f: DomainFile = serde_json::from_str(&text)
                    .with_context(|| format!("parsing domain file {}", path.display()))?;
                StarDomain::try_from(f)?
            }
            (None, Some(c)) => {
                let n = self.dimension.context("--coefficients needs --dimension")?;
                StarDomain::new(n, c.clone(), vec![0.0; n])?
            }
            _ => bail!("give exactly one of --domain or --coefficients"),
        };
        if let Some(n) = self.dimension {
            if n != d.dimension() {
                bail!(
                    "--dimension {n} disagrees with the domain dimension {}",
                    d.dimension()
                );
            }
        }
        Ok(d)
    }
}

/// Γ directly, or the physical pair (γ, u₀) or (γ, α).
#[derive(Debug, Clone, Args)]
pub struct ParameterArgs {
    #[arg(long = "Gamma", allow_hyphen_values = true, value_parser = parse_real, conflicts_with_all = ["gamma", "u0", "alpha"])]
    pub big_gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real, conflicts_with = "alpha")]
    pub u0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
    pub alpha: Option<f64>,
}

impl ParameterArgs {
    pub fn resolve(&self, dimension: usize) -> anyhow::Result<f64> {
        match (self.big_gamma, self.gamma, self.u0, self.alpha) {
            (Some(g), None, None, None) => Ok(g),
            (None, Some(g), Some(u0), None) => {
                Ok(normalize(&ProblemData::new(dimension, u0, g, 1.0, None)?)?.gamma)
            }
            (None, Some(g), None, Some(a)) => {
                Ok(normalize(&ProblemData::new(dimension, 0.0, g, 1.0, Some(a))?)?.gamma)
            }
            _ => bail!("give exactly one of --Gamma, (--gamma, --u0) or (--gamma, --alpha)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeList(pub Vec<usize>);

pub fn parse_modes(s: &str) -> Result<ModeList, String> {
    let bad = |_| format!("invalid mode list `{s}`");
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(bad)?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(bad)?;
        if a > b {
            return Err(format!("empty mode range `{s}`"));
        }
        return Ok(ModeList((a..=b).collect()));
    }
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(bad))
        .collect::<Result<Vec<_>, _>>()
        .map(ModeList)
}

/// A real number, also accepted as a fraction `p/q`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
            let q: f64 = q.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
            p / q
        }
        None => s.parse().map_err(|e| format!("`{s}`: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_lists() {
        assert_eq!(parse_modes("2..6").unwrap().0, vec![2, 3, 4, 5, 6]);
        assert_eq!(parse_modes("0,2,5").unwrap().0, vec![0, 2, 5]);
        assert!(parse_modes("6..2").is_err());
        assert!(parse_modes("x").is_err());
    }

    #[test]
    fn reals_and_fractions() {
        assert_eq!(parse_real("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_real("-0.5").unwrap(), -0.5);
        assert!(parse_real("1/0").is_err());
    }

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
