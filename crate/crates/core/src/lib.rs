//! Exterior capacitary potentials on star-shaped domains and the overdetermined condition
//! `∂_ν u = Γ𝓗 + Γ - (N-2)`.

pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod identities;
pub mod overdet;
pub mod report;
pub mod search;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
pub use geometry::{BoundaryGrid, MinkowskiMoments, StarDomain};
pub use harmonic::{ExteriorExpansion, SolverOptions};
pub use identities::{IdentityReport, IdentitySuite};
pub use overdet::{NormalizedProblem, ProblemData, Residual};
pub use search::{Branch, BranchPoint, SolveOptions, SolveReport, SweepRow, VolumeHandling};
pub use spectrum::{ModeEigenvalue, SecondOrder};
