//! Deterministic point sampling from a seeded 64-bit LCG.

use crate::error::{Error, Result};
use crate::expr::ParamPoint;
use crate::geometry::SurfaceSpec;

/// Fraction of each side trimmed from the domain before sampling.
pub const MARGIN: f64 = 0.05;

/// Knuth's MMIX linear congruential generator.
#[derive(Debug, Clone)]
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Lcg {
        Lcg(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform in `[0, 1)` from the high 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, [a, b]: [f64; 2]) -> f64 {
        a + (b - a) * self.next_f64()
    }
}

/// `n` points in the spec's domain shrunk by [`MARGIN`], skipping exclusion
/// bands.
pub fn sample_points(spec: &SurfaceSpec, n: usize, seed: u64) -> Result<Vec<ParamPoint>> {
    let inner = spec.domain.shrink(MARGIN);
    let mut rng = Lcg::new(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        if attempts > 1000 * n.max(1) {
            return Err(Error::EmptySample);
        }
        let p = ParamPoint::new(rng.uniform(inner.u), rng.uniform(inner.v));
        if !spec.excluded(p) {
            out.push(p);
        }
    }
    Ok(out)
}
