//! Reproducible, order-independent random streams.
//!
//! Each work item (a Monte Carlo trial, a trajectory) draws from its own
//! ChaCha8 stream keyed by `(seed, index)`. ChaCha is counter based, so the
//! mapping from `(seed, index)` to samples does not depend on evaluation
//! order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub index: u64,
}

impl StreamId {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }
}
