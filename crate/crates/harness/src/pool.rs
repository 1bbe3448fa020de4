//! Client-side pool of ephemeral ML-KEM key pairs, refilled eight at a time.

use crate::error::Result;
use pqkem::keccak::BATCH_WIDTH;
use pqkem::rng::CryptoRngCore;
use pqkem::{Backend, Kem, KemKeyPair, KeygenSeed, ParameterSet, Transform};
use std::collections::VecDeque;

/// FIFO of pre-generated key pairs. FO pools refill with one
/// `batch_keygen` call; the other transforms run eight single keygens.
pub struct KeyPool {
    kem: Kem,
    shared_z: bool,
    queue: VecDeque<KemKeyPair>,
    refills: u64,
}

impl KeyPool {
    pub fn new(set: ParameterSet, transform: Transform, backend: Backend, shared_z: bool) -> Self {
        KeyPool {
            kem: Kem::new(transform, set).with_backend(backend),
            shared_z,
            queue: VecDeque::with_capacity(BATCH_WIDTH),
            refills: 0,
        }
    }

    pub fn set(&self) -> ParameterSet {
        self.kem.set
    }

    pub fn transform(&self) -> Transform {
        self.kem.transform
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn refills(&self) -> u64 {
        self.refills
    }

    fn refill(&mut self, rng: &mut dyn CryptoRngCore) -> Result<()> {
        let seeds = KeygenSeed::random_batch(rng, self.shared_z);
        let pairs = match self.kem.transform {
            Transform::Fo => self.kem.batch_keygen(&seeds)?,
            _ => seeds.iter().map(|s| self.kem.keygen_derand(s)).collect(),
        };
        self.queue.extend(pairs);
        self.refills += 1;
        Ok(())
    }

    /// Oldest unused key pair, refilling first when empty.
    pub fn take(&mut self, rng: &mut dyn CryptoRngCore) -> Result<KemKeyPair> {
        if self.queue.is_empty() {
            self.refill(rng)?;
        }
        Ok(self.queue.pop_front().expect("refilled pool is non-empty"))
    }
}
