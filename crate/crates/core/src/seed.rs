//! Deterministic random streams.
//!
//! Every random draw in a run comes from a ChaCha8 stream keyed by the pair
//! `(master seed, run index)`. The key is the two integers laid out side by
//! side, so distinct pairs always give distinct keys. Within a run, phases get
//! their own stream number: incomes use [`INCOME_STREAM`], and agent `i`'s
//! link draws use `NETWORK_STREAM_BASE + i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const INCOME_STREAM: u64 = 0;
pub const NETWORK_STREAM_BASE: u64 = 1;

/// Identifies one run inside an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunKey {
    pub master: u64,
    pub run: u64,
}

impl RunKey {
    pub fn new(master: u64, run: u64) -> Self {
        RunKey { master, run }
    }

    fn key_bytes(self) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master.to_le_bytes());
        key[8..16].copy_from_slice(&self.run.to_le_bytes());
        key
    }

    /// Random stream number `stream` of this run.
    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key_bytes());
        rng.set_stream(stream);
        rng
    }

    pub fn income_rng(self) -> ChaCha8Rng {
        self.stream(INCOME_STREAM)
    }

    pub fn agent_rng(self, agent: usize) -> ChaCha8Rng {
        self.stream(NETWORK_STREAM_BASE + agent as u64)
    }
}
