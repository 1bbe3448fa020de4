//! Randomness sources for the randomized wrappers.

use rand_core::{CryptoRng, RngCore};

use crate::keccak::{KeccakState, Variant};

pub use rand_core::{CryptoRngCore, OsRng};

/// Deterministic generator for tests and replay: the SHAKE256 stream of
/// `seed || counter`, refilled every 136 bytes.
///
/// Its output is fully determined by the seed, so it only counts as
/// cryptographic randomness when the seed itself is secret and fresh.
#[derive(Clone)]
pub struct CounterRng {
    seed: [u8; 32],
    counter: u64,
    buf: [u8; 136],
    pos: usize,
}

impl CounterRng {
    pub fn new(seed: [u8; 32]) -> Self {
        CounterRng {
            seed,
            counter: 0,
            buf: [0; 136],
            pos: 136,
        }
    }

    pub fn from_u64(seed: u64) -> Self {
        let mut s = [0u8; 32];
        s[..8].copy_from_slice(&seed.to_le_bytes());
        Self::new(s)
    }

    fn refill(&mut self) {
        let mut st = KeccakState::new(Variant::Shake256);
        st.absorb(&self.seed);
        st.absorb(&self.counter.to_le_bytes());
        st.squeeze(&mut self.buf);
        self.counter += 1;
        self.pos = 0;
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        let mut b = [0u8; 4];
        self.fill_bytes(&mut b);
        u32::from_le_bytes(b)
    }

    fn next_u64(&mut self) -> u64 {
        let mut b = [0u8; 8];
        self.fill_bytes(&mut b);
        u64::from_le_bytes(b)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for d in dest.iter_mut() {
            if self.pos == self.buf.len() {
                self.refill();
            }
            *d = self.buf[self.pos];
            self.pos += 1;
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

impl CryptoRng for CounterRng {}

pub(crate) fn random_seed(rng: &mut dyn CryptoRngCore) -> [u8; 32] {
    let mut s = [0u8; 32];
    rng.fill_bytes(&mut s);
    s
}
