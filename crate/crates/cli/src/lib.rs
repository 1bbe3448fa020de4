//! Timing helpers shared by the `pqkem` binary and its acceptance checks.

use pqkem::rng::CounterRng;
use pqkem::{Kem, KemKeyPair, KeygenSeed};
use std::time::Instant;

/// Reads the time-stamp counter where there is one.
#[inline]
pub fn cycles() -> Option<u64> {
    #[cfg(target_arch = "x86_64")]
    {
        #[allow(unused_unsafe)]
        // SAFETY: rdtsc has no preconditions on x86_64.
        Some(unsafe { core::arch::x86_64::_rdtsc() })
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        None
    }
}

pub fn median(xs: &[f64]) -> f64 {
    pqkex::bench::median(xs)
}

/// Per-operation cost of one measured run.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sample {
    pub ns: f64,
    pub cycles: Option<f64>,
}

/// Medians over runs.
#[derive(Debug, Clone, Default)]
pub struct Stat {
    pub runs: Vec<Sample>,
}

impl Stat {
    pub fn median_ns(&self) -> f64 {
        median(&self.runs.iter().map(|s| s.ns).collect::<Vec<_>>())
    }

    pub fn median_cycles(&self) -> Option<f64> {
        let c: Option<Vec<f64>> = self.runs.iter().map(|s| s.cycles).collect();
        c.map(|c| median(&c))
    }
}

/// Times `iters` calls of `f` per run, `runs` times.
pub fn measure(runs: usize, iters: usize, mut f: impl FnMut(usize)) -> Stat {
    f(0);
    let runs = (0..runs)
        .map(|_| {
            let c0 = cycles();
            let t0 = Instant::now();
            for i in 0..iters {
                f(i);
            }
            let ns = t0.elapsed().as_nanos() as f64 / iters as f64;
            let cyc = c0.zip(cycles()).map(|(a, b)| b.wrapping_sub(a) as f64 / iters as f64);
            Sample { ns, cycles: cyc }
        })
        .collect();
    Stat { runs }
}

#[derive(Debug, Clone)]
pub struct KemTimings {
    pub keygen: Stat,
    pub encaps: Stat,
    pub decaps: Stat,
}

/// Keygen, encaps and decaps timings for one KEM with fixed seeds.
pub fn bench_kem(kem: &Kem, runs: usize, iters: usize, seed: u64) -> KemTimings {
    let mut rng = CounterRng::from_u64(seed);
    let seeds: Vec<KeygenSeed> = (0..iters).map(|_| KeygenSeed::random(&mut rng)).collect();
    let keygen = measure(runs, iters, |i| {
        std::hint::black_box(kem.keygen_derand(&seeds[i]));
    });
    let pairs: Vec<KemKeyPair> = seeds.iter().map(|s| kem.keygen_derand(s)).collect();
    let coins: Vec<([u8; 32], [u8; 32])> = (0..iters)
        .map(|i| {
            let mut m = [0u8; 32];
            let mut r = [0u8; 32];
            m[..8].copy_from_slice(&(i as u64).to_le_bytes());
            r[..8].copy_from_slice(&(!(i as u64)).to_le_bytes());
            (m, r)
        })
        .collect();
    let encaps = measure(runs, iters, |i| {
        std::hint::black_box(kem.encaps_derand(&pairs[i].ek, &coins[i].0, &coins[i].1).expect("encaps"));
    });
    let cts: Vec<Vec<u8>> = (0..iters)
        .map(|i| kem.encaps_derand(&pairs[i].ek, &coins[i].0, &coins[i].1).expect("encaps").ct)
        .collect();
    let decaps = measure(runs, iters, |i| {
        std::hint::black_box(kem.decaps(&pairs[i].dk, &cts[i]).expect("decaps"));
    });
    KemTimings { keygen, encaps, decaps }
}

/// One `batch_keygen` of eight against eight single keygens on the same seeds.
#[derive(Debug, Clone)]
pub struct BatchTimings {
    pub batch: Stat,
    pub single_x8: Stat,
}

impl BatchTimings {
    pub fn ratio(&self) -> f64 {
        self.batch.median_ns() / self.single_x8.median_ns()
    }
}

pub fn bench_batch(kem: &Kem, runs: usize, iters: usize, shared_z: bool, seed: u64) -> pqkem::Result<BatchTimings> {
    let mut rng = CounterRng::from_u64(seed);
    let batches: Vec<_> = (0..iters).map(|_| KeygenSeed::random_batch(&mut rng, shared_z)).collect();
    kem.batch_keygen(&batches[0])?;
    let batch = measure(runs, iters, |i| {
        std::hint::black_box(kem.batch_keygen(&batches[i]).expect("batch keygen"));
    });
    let single_x8 = measure(runs, iters, |i| {
        for s in &batches[i] {
            std::hint::black_box(kem.keygen_derand(s));
        }
    });
    Ok(BatchTimings { batch, single_x8 })
}
