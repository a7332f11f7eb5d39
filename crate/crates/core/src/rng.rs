//! Pinned pseudo-random generator.
//!
//! Every random draw in the crate goes through [`Prng`], which is
//! xoshiro256++ seeded from a single `u64` by expanding it with SplitMix64
//! into the four state words (in order). The derived draws are defined here
//! rather than borrowed from `rand` so that other implementations can
//! reproduce transcripts bit for bit:
//!
//! * `next_f64`: `(next_u64() >> 11) * 2^-53`, uniform on `[0, 1)`.
//! * `below(b)`: Lemire's multiply-shift with rejection, unbiased on `[0, b)`.
//! * `fill_bits`: one `next_u64()` per 64 output bits, least significant
//!   bit first.
//!
//! Test vectors (seed 0): the first three `next_u64()` outputs are
//! `0x53175d61490b23df`, `0x61da6f3dc380d507`, `0x5c0fdf91ec9a7bfc`.

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer applied to `x + gamma`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed for `(stream, index)` under `master`.
///
/// The result only depends on its arguments, never on evaluation order, so
/// trials can be scheduled on any number of threads.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(stream)) ^ index)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prng(Xoshiro256PlusPlus);

impl Prng {
    pub fn from_seed(seed: u64) -> Self {
        Prng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let wide = (self.next_u64() as u128) * (bound as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }

    /// Appends `len` uniform bits (as 0/1 bytes) to `out`.
    pub fn fill_bits(&mut self, len: usize, out: &mut Vec<u8>) {
        out.reserve(len);
        let mut remaining = len;
        while remaining > 0 {
            let word = self.next_u64();
            let take = remaining.min(64);
            out.extend((0..take).map(|i| ((word >> i) & 1) as u8));
            remaining -= take;
        }
    }

    pub fn bits(&mut self, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        self.fill_bits(len, &mut out);
        out
    }

    /// Draws `count` distinct elements of `pool` uniformly at random, in
    /// draw order, by a partial Fisher-Yates shuffle of a copy of `pool`.
    pub fn sample<T: Copy>(&mut self, pool: &[T], count: usize) -> Vec<T> {
        assert!(count <= pool.len(), "sample larger than pool");
        let mut scratch = pool.to_vec();
        for i in 0..count {
            let j = i + self.below((scratch.len() - i) as u64) as usize;
            scratch.swap(i, j);
        }
        scratch.truncate(count);
        scratch
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in 0..items.len().saturating_sub(1) {
            let j = i + self.below((items.len() - i) as u64) as usize;
            items.swap(i, j);
        }
    }
}
