//! Deterministic, splittable randomness.
//!
//! One 64-bit seed per run. Every independent trial gets its own ChaCha
//! stream, so results do not depend on how trials are distributed over
//! workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

pub type TrialRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_0fa7_4a11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
    domain: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, domain: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A stream family for an independent purpose (e.g. state preparation vs
    /// branch sampling) derived from the same seed.
    pub fn domain(&self, tag: u64) -> Self {
        let mixed = self
            .seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .rotate_left(17)
            ^ tag.wrapping_mul(0xbf58_476d_1ce4_e5b9)
            ^ self.domain.wrapping_mul(0x94d0_49bb_1331_11eb);
        Self { seed: mixed, domain: self.domain.wrapping_add(1) }
    }

    /// The generator for trial `index`.
    pub fn trial(&self, index: u64) -> TrialRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Runs `trials` independent trials in parallel, one stream per trial index,
/// and folds their results with `merge`. The result does not depend on the
/// number of worker threads as long as `merge` is associative and
/// commutative.
pub fn par_trials<A, F, M>(trials: u64, stream: SeedStream, identity: A, run: F, merge: M) -> Result<A>
where
    A: Clone + Send + Sync,
    F: Fn(u64, &mut TrialRng) -> Result<A> + Sync,
    M: Fn(A, A) -> A + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| run(i, &mut stream.trial(i)))
        .try_reduce(|| identity.clone(), |a, b| Ok(merge(a, b)))
}

/// Runs `trials` independent trials in parallel and returns their results in
/// trial order.
pub fn par_map<A, F>(trials: u64, stream: SeedStream, run: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(u64, &mut TrialRng) -> Result<A> + Sync,
{
    (0..trials).into_par_iter().map(|i| run(i, &mut stream.trial(i))).collect()
}

/// Counts successful trials.
pub fn par_count<F>(trials: u64, stream: SeedStream, run: F) -> Result<u64>
where
    F: Fn(&mut TrialRng) -> Result<bool> + Sync,
{
    par_trials(trials, stream, 0u64, |_, rng| run(rng).map(u64::from), |a, b| a + b)
}
