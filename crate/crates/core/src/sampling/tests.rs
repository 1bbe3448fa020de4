use super::*;
use crate::params::{ParameterSet, ParameterSetName};
use crate::testdata::Trace;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn backends() -> Vec<Backend> {
    let mut v = vec![Backend::scalar()];
    if let Ok(b) = Backend::vector() {
        v.push(b);
    }
    v
}

/// Reads each 3-byte group as one 24-bit little-endian integer and splits
/// it into its low and high 12 bits.
fn parse_oracle(bytes: &[u8]) -> Vec<i16> {
    let mut out = Vec::new();
    for t in bytes.chunks_exact(3) {
        let w = t[0] as u32 + 256 * t[1] as u32 + 65536 * t[2] as u32;
        for cand in [w % 4096, w / 4096] {
            if cand < 3329 && out.len() < 256 {
                out.push(cand as i16);
            }
        }
    }
    out
}

fn cbd_oracle(bytes: &[u8], eta: usize) -> [i16; 256] {
    let bit = |i: usize| ((bytes[i / 8] >> (i % 8)) & 1) as i16;
    let mut f = [0i16; 256];
    for (i, c) in f.iter_mut().enumerate() {
        let a: i16 = (0..eta).map(|j| bit(2 * i * eta + j)).sum();
        let b: i16 = (0..eta).map(|j| bit(2 * i * eta + eta + j)).sum();
        *c = a - b;
    }
    f
}

#[test]
fn parse_single_candidates() {
    for backend in backends() {
        let mut block = vec![0u8; 24];
        block[0] = 0xff;
        block[1] = 0x0f;
        // 0xfff rejected, then 0x000 accepted from the same group.
        let mut out = [0i16; 256];
        let mut ctr = 0;
        parse_uniform(backend, &block, &mut out, &mut ctr);
        assert_eq!(ctr, 15);
        assert!(out[..15].iter().all(|&c| c == 0));
    }
}

#[test]
fn parse_matches_oracle() {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    for backend in backends() {
        for _ in 0..500 {
            let mut bytes = vec![0u8; 24 * rng.gen_range(1..40)];
            rng.fill_bytes(&mut bytes);
            // Bias towards rejections.
            for b in bytes.iter_mut().skip(2).step_by(3) {
                if rng.gen_bool(0.3) {
                    *b |= 0xd0;
                }
            }
            let want = parse_oracle(&bytes);
            let mut out = [0i16; 256];
            let mut ctr = 0;
            parse_uniform(backend, &bytes, &mut out, &mut ctr);
            assert_eq!(ctr, want.len());
            assert_eq!(&out[..ctr], &want[..]);
        }
    }
}

#[test]
fn parse_resumes_from_counter() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let mut bytes = vec![0u8; 168 * 4];
    rng.fill_bytes(&mut bytes);
    let want = parse_oracle(&bytes);
    for backend in backends() {
        let mut out = [0i16; 256];
        let mut ctr = 0;
        for block in bytes.chunks(168) {
            parse_uniform(backend, block, &mut out, &mut ctr);
        }
        assert_eq!(&out[..], &want[..]);
    }
}

#[test]
fn sample_uniform_matches_oracle_stream() {
    let rho = [7u8; 32];
    let mut raw = XofStream::new(&rho, 1, 2);
    let mut bytes = vec![0u8; 168 * 6];
    raw.read(&mut bytes);
    let want = parse_oracle(&bytes);
    for backend in backends() {
        let mut stream = XofStream::new(&rho, 1, 2);
        let p = sample_uniform(backend, &mut stream);
        assert_eq!(p.to_bit_reversed().to_vec(), want);
        assert_eq!(p.layout(), backend.ntt_layout());
        assert_eq!(stream.bytes_consumed() % 168, 0);
    }
}

#[test]
fn uniform_mean_within_three_sigma() {
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let mut sum = 0f64;
    let polys = 10_000;
    for _ in 0..polys {
        let mut rho = [0u8; 32];
        rng.fill_bytes(&mut rho);
        let p = sample_uniform(Backend::scalar(), &mut XofStream::new(&rho, 0, 0));
        for c in p.to_bit_reversed() {
            assert!((0..3329).contains(&c));
            sum += c as f64;
        }
    }
    let count = (polys * 256) as f64;
    let mean = sum / count;
    let sigma = (3329f64 * 3329.0 - 1.0).sqrt() / 12f64.sqrt() / count.sqrt();
    assert!((mean - 1664.0).abs() < 3.0 * sigma, "mean {mean}, sigma {sigma}");
}

#[test]
fn cbd_edges_and_errors() {
    for eta in [2, 3] {
        assert_eq!(sample_cbd(&vec![0; 64 * eta], eta).unwrap(), Poly::zero());
        assert_eq!(sample_cbd(&vec![0xff; 64 * eta], eta).unwrap(), Poly::zero());
        assert!(matches!(sample_cbd(&vec![0; 64 * eta + 1], eta), Err(Error::InvalidParameter(_))));
    }
    assert!(sample_cbd(&[0; 64], 1).is_err());
}

#[test]
fn cbd_matches_bit_oracle() {
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    for eta in [2, 3] {
        for _ in 0..2000 {
            let mut bytes = vec![0u8; 64 * eta];
            rng.fill_bytes(&mut bytes);
            let p = sample_cbd(&bytes, eta).unwrap();
            assert_eq!(p.coeffs, cbd_oracle(&bytes, eta));
        }
    }
}

#[test]
fn cbd_distribution_chi_squared() {
    fn binom(n: u64, r: u64) -> f64 {
        (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }
    let mut rng = ChaCha20Rng::seed_from_u64(14);
    // Critical values of chi-squared at p = 0.001 for 4 and 6 degrees of freedom.
    for (eta, critical) in [(2usize, 18.467), (3usize, 22.458)] {
        let mut counts = vec![0u64; 2 * eta + 1];
        let polys = 100_000 / 256 + 1;
        for _ in 0..polys {
            let mut bytes = vec![0u8; 64 * eta];
            rng.fill_bytes(&mut bytes);
            for c in sample_cbd(&bytes, eta).unwrap().coeffs {
                assert!(c.unsigned_abs() as usize <= eta);
                counts[(c + eta as i16) as usize] += 1;
            }
        }
        let total: u64 = counts.iter().sum();
        let chi: f64 = counts
            .iter()
            .enumerate()
            .map(|(v, &obs)| {
                let p = binom(2 * eta as u64, v as u64) / (1u64 << (2 * eta)) as f64;
                let exp = p * total as f64;
                (obs as f64 - exp).powi(2) / exp
            })
            .sum();
        assert!(chi < critical, "eta {eta}: chi^2 = {chi}");
    }
}

#[test]
fn matrix_is_deterministic_and_transposes() {
    let rho = [3u8; 32];
    for backend in backends() {
        for k in 2..=4 {
            let a = expand_matrix(backend, &rho, k, false).unwrap();
            assert_eq!(a, expand_matrix(backend, &rho, k, false).unwrap());
            let at = expand_matrix(backend, &rho, k, true).unwrap();
            for i in 0..k {
                for j in 0..k {
                    assert_eq!(at[i][j], a[j][i]);
                }
            }
        }
    }
    assert!(expand_matrix(Backend::scalar(), &rho, 5, false).is_err());
}

#[test]
fn batched_matrix_matches_sequential() {
    let mut rng = ChaCha20Rng::seed_from_u64(15);
    for backend in backends() {
        for _ in 0..50 {
            let mut rho = [0u8; 32];
            rng.fill_bytes(&mut rho);
            let k = rng.gen_range(2..=4);
            let t = rng.gen_bool(0.5);
            let seq = expand_matrix_sequential(Backend::scalar(), &rho, k, t).unwrap();
            assert_eq!(expand_matrix_batched(backend, &rho, k, t).unwrap(), seq);
            assert_eq!(expand_matrix(backend, &rho, k, t).unwrap(), seq);
        }
    }
}

#[test]
fn matrix_and_noise_match_trace() {
    for name in ParameterSetName::ALL {
        let set = ParameterSet::from(name);
        let trace = Trace::load(name);
        let rho = trace.seed("ρ");
        let sigma = trace.seed("σ");
        for backend in backends() {
            let a = expand_matrix(backend, &rho, set.k, false).unwrap();
            assert_eq!(a[0][0].canonical().to_bit_reversed(), trace.coeffs("A[0, 0]"), "{name}");
            let etas = vec![set.eta1; set.k];
            let s = sample_noise(backend, &sigma, 0, &etas).unwrap();
            assert_eq!(s[0].canonical().coeffs, trace.coeffs("s[0]"), "{name}");
        }
    }
}

#[test]
fn prf_batches_match_scalar() {
    let sigma = [9u8; 32];
    for backend in backends() {
        let lens = [192, 128, 128, 128, 64, 1, 0, 500, 128];
        let out = prf_many(backend, &sigma, 4, &lens);
        for (i, (o, &l)) in out.iter().zip(&lens).enumerate() {
            let mut input = sigma.to_vec();
            input.push(4 + i as u8);
            assert_eq!(*o, crate::keccak::shake_xof(Variant::Shake256, &input, l));
        }
    }
}

#[test]
fn vector_sampling_matches_scalar() {
    let Ok(vector) = Backend::vector() else {
        eprintln!("skipping: AVX-512 backend unavailable on this host");
        return;
    };
    let mut rng = ChaCha20Rng::seed_from_u64(16);
    for _ in 0..10_000 {
        let mut rho = [0u8; 32];
        rng.fill_bytes(&mut rho);
        let (i, j) = (rng.gen(), rng.gen());
        let a = sample_uniform(Backend::scalar(), &mut XofStream::new(&rho, i, j));
        let b = sample_uniform(vector, &mut XofStream::new(&rho, i, j));
        assert_eq!(a, b);
        let etas = [2, 3, 2];
        assert_eq!(
            sample_noise(Backend::scalar(), &rho, i, &etas).unwrap(),
            sample_noise(vector, &rho, i, &etas).unwrap()
        );
    }
}

#[test]
fn multi_seed_helpers_match_single_seed() {
    let mut r = ChaCha20Rng::seed_from_u64(31);
    for b in backends() {
        for count in [1usize, 2, 3, 8, 9] {
            let seeds: Vec<[u8; 32]> = (0..count).map(|_| r.gen()).collect();
            let refs: Vec<&[u8; 32]> = seeds.iter().collect();
            for k in 2..=4 {
                let many = expand_matrices(b, &refs, k, false).unwrap();
                for (s, m) in seeds.iter().zip(&many) {
                    assert_eq!(m, &expand_matrix_sequential(Backend::scalar(), s, k, false).unwrap());
                }
                let etas = vec![3, 3, 2, 2, 2][..k].to_vec();
                let noise = sample_noise_many(b, &refs, 4, &etas).unwrap();
                for (s, n) in seeds.iter().zip(&noise) {
                    assert_eq!(n, &sample_noise(Backend::scalar(), s, 4, &etas).unwrap());
                }
            }
            assert_eq!(sample_noise_many(b, &refs, 0, &[]).unwrap().len(), count);
        }
    }
}
