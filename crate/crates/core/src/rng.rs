//! Reproducible random numbers for the synthetic data generator.
//!
//! The generator is xoshiro256** seeded through SplitMix64 (the reference
//! `seed_from_u64` expansion). Uniforms take the top 53 bits of each output;
//! normals use the cosine branch of Box-Muller, consuming two outputs each.
//! Any implementation of these three steps reproduces the same streams.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

#[derive(Debug, Clone)]
pub struct SynthRng(Xoshiro256StarStar);

impl SynthRng {
    pub fn new(seed: u64) -> Self {
        SynthRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
