use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("unsupported dimension {dimension} for {operation}")]
    UnsupportedDimension {
        dimension: usize,
        operation: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Dirichlet fit did not converge: residual {residual:.3e} exceeds {limit:.1e}")]
    Convergence { residual: f64, limit: f64 },

    #[error("grid and domain do not match")]
    GridMismatch,

    #[error("u0 = 0 is the Alexandrov case: the Dirichlet level vanishes, u ≡ 0 and the curvature is constant")]
    AlexandrovCase,

    #[error("mode l = 1 is the translation mode and carries no bifurcation")]
    TranslationMode,

    #[error("conformal metric u^(2/Γ)δ is undefined for Γ = 0")]
    UndefinedConformalMetric,

    #[error("exponent p = {p} is below the admissible threshold {threshold}")]
    InadmissibleExponent { p: f64, threshold: f64 },

    #[error("second-order extrapolation failed: {0}")]
    Extrapolation(String),

    #[error("domain volume {volume} differs from the unit-ball volume {target}")]
    VolumeNotNormalized { volume: f64, target: f64 },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
