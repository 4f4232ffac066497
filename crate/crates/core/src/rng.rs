//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed. Sub-streams for
//! trajectories of a batch share the master key and differ only in the ChaCha
//! stream id, so a grid of simulations can be evaluated in any order (or in
//! parallel) and still reproduce bit-for-bit.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Independent stream `index` derived from `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self {
            seed,
            stream: index,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        loop {
            let u: f64 = self.inner.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Exponential(1) draw.
    pub fn exp1(&mut self) -> f64 {
        -self.open01().ln()
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
