//! Deterministic, splittable random streams.
//!
//! Every `(run, agent, purpose)` tuple gets its own ChaCha8 stream whose seed
//! is derived from the master seed by SplitMix64 finalization. Adding an agent
//! to a society therefore never shifts the draws seen by the other agents.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    /// Action sampling.
    Act = 1,
    /// Bernoulli reward draws from the environment.
    Reward = 2,
    /// Thompson-sampling policy estimation (Monte Carlo only).
    Posterior = 3,
    /// Observation-channel noise applied to others' actions.
    Noise = 4,
}

#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for the stream identified by `(run, agent, purpose)`.
pub fn derive_seed(master: u64, run: u64, agent: u64, purpose: Purpose) -> u64 {
    let mut h = mix64(master);
    h = mix64(h ^ run);
    h = mix64(h ^ agent.wrapping_mul(0xD1B5_4A32_D192_ED03));
    mix64(h ^ (purpose as u64))
}

/// An exclusively owned random stream.
#[derive(Debug, Clone)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn derive(master: u64, run: u64, agent: u64, purpose: Purpose) -> Self {
        Self::from_seed(derive_seed(master, run, agent, purpose))
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Lemire's nearly-divisionless method, rejection keeps it unbiased.
        let n = n as u64;
        loop {
            let m = (self.0.next_u64() as u128) * (n as u128);
            let lo = m as u64;
            if lo >= n.wrapping_neg() % n {
                return (m >> 64) as usize;
            }
        }
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
