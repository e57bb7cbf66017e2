//! Deterministic random streams.
//!
//! Every stream is xoshiro256** seeded from a single `u64` through SplitMix64
//! (the reference seeding procedure). Derived values use fixed transforms so
//! the streams can be replicated outside Rust:
//!
//! * uniform `[0, 1)`: `(next_u64() >> 11) * 2^-53`
//! * standard normal: Box–Muller, cosine branch only, two uniforms per draw,
//!   `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`
//! * index below `n`: `floor(uniform * n)`

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone, Debug)]
pub struct SimRng {
    inner: Xoshiro256StarStar,
}

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn index_below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// Fisher–Yates shuffle drawing indices with [`SimRng::index_below`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index_below(i + 1);
            items.swap(i, j);
        }
    }
}

/// Seed of trial `index` in a sweep with base seed `base`.
///
/// Plain offset; the SplitMix64 expansion inside [`SimRng::from_seed`] does the
/// mixing, so adjacent trial seeds still give unrelated streams.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}
