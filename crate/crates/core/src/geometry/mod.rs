//! Star-shaped domains as radial graphs and their boundary geometry.

mod domain;
mod grid;
mod reparam;

pub use domain::{DomainFile, RadialSample, StarDomain};
pub use grid::{BoundaryGrid, MinkowskiMoments};
pub use reparam::{recenter, translate};

use crate::error::Result;

/// Discretize Σ with `node_count` nodes.
pub fn boundary_grid(domain: &StarDomain, node_count: usize) -> Result<BoundaryGrid> {
    BoundaryGrid::new(domain, node_count)
}

/// |Ω|.
pub fn volume(domain: &StarDomain) -> f64 {
    domain.volume()
}

/// |Σ|.
pub fn surface_measure(domain: &StarDomain) -> f64 {
    domain.surface_measure()
}

pub fn minkowski_moments(grid: &BoundaryGrid) -> MinkowskiMoments {
    grid.minkowski_moments()
}
