//! Shape solves for the overdetermined problem, rigidity sweeps and branch continuation.

mod branch;
mod lm;
mod random;
mod solve;
mod sweep;

pub use branch::{
    continue_branch, continue_branch_with, write_branch_csv, Branch, BranchPoint, VolumeHandling,
};
pub use random::{random_domain, RANDOM_AMPLITUDE, RANDOM_MODES};
pub use solve::{distance_to_ball, solve_shape, SolveOptions, SolveReport};
pub use sweep::{rigidity_sweep, write_sweep_csv, SweepRow};
