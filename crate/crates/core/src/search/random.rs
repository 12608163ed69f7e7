use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::StarDomain;

/// Lowest and highest perturbed modes of random shapes.
pub const RANDOM_MODES: (usize, usize) = (2, 6);
/// Bound on Σ|coefficient| of the perturbation.
pub const RANDOM_AMPLITUDE: f64 = 0.15;

/// A seeded random star-shaped domain: the unit ball perturbed on modes 2..=6 with total
/// coefficient mass at most `amplitude`. Mode 1 is absent, so the domain is centered.
pub fn random_domain(dimension: usize, seed: u64, amplitude: f64) -> Result<StarDomain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = RANDOM_MODES;
    let mut c = if dimension == 2 {
        vec![0.0; 2 * hi + 1]
    } else {
        vec![0.0; hi + 1]
    };
    c[0] = 1.0;
    let slots: Vec<usize> = if dimension == 2 {
        (2 * lo - 1..=2 * hi).collect()
    } else {
        (lo..=hi).collect()
    };
    let raw: Vec<f64> = slots.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mass: f64 = raw.iter().map(|v: &f64| v.abs()).sum();
    let total = amplitude * rng.gen_range(0.2..1.0);
    for (slot, v) in slots.iter().zip(&raw) {
        c[*slot] = total * v / mass;
    }
    StarDomain::new(dimension, c, vec![0.0; dimension])
}
