//! Uniform rejection sampling from SHAKE128, centered binomial noise from
//! SHAKE256 and expansion of the public matrix.

#[cfg(target_arch = "x86_64")]
mod avx512;

use crate::error::{Error, Result};
use crate::keccak::{hash_many, BatchKeccakState, KeccakState, Variant, BATCH_WIDTH};
use crate::params::{N, Q};
use crate::polyring::{Backend, NttPoly, Poly};

/// SHAKE128 output block length.
pub const XOF_BLOCK: usize = 168;

/// A SHAKE128 stream seeded with `rho || j || i`.
#[derive(Clone)]
pub struct XofStream {
    state: KeccakState,
    bytes_consumed: usize,
}

impl XofStream {
    pub fn new(rho: &[u8; 32], j: u8, i: u8) -> Self {
        let mut state = KeccakState::new(Variant::Shake128);
        state.absorb(rho);
        state.absorb(&[j, i]);
        XofStream {
            state,
            bytes_consumed: 0,
        }
    }

    pub fn read(&mut self, out: &mut [u8]) {
        self.state.squeeze(out);
        self.bytes_consumed += out.len();
    }

    pub fn bytes_consumed(&self) -> usize {
        self.bytes_consumed
    }
}

/// Parses 12-bit candidates from `bytes` (a multiple of 3 long) into
/// `out[*ctr..]`, dropping those `>= q`, until 256 are accepted.
pub fn parse_uniform_scalar(bytes: &[u8], out: &mut [i16; N], ctr: &mut usize) {
    for t in bytes.chunks_exact(3) {
        if *ctr >= N {
            return;
        }
        let d1 = (t[0] as u16) | ((t[1] as u16 & 0x0f) << 8);
        let d2 = ((t[1] as u16) >> 4) | ((t[2] as u16) << 4);
        if d1 < Q as u16 {
            out[*ctr] = d1 as i16;
            *ctr += 1;
        }
        if d2 < Q as u16 && *ctr < N {
            out[*ctr] = d2 as i16;
            *ctr += 1;
        }
    }
}

/// Same contract as [`parse_uniform_scalar`]; `bytes.len()` must be a
/// multiple of 24 on the vector backend.
pub fn parse_uniform(backend: Backend, bytes: &[u8], out: &mut [i16; N], ctr: &mut usize) {
    #[cfg(target_arch = "x86_64")]
    if backend.is_vector() && bytes.len().is_multiple_of(24) {
        // SAFETY: vector backends exist only after feature detection.
        unsafe { avx512::parse_uniform(bytes, out, ctr) };
        return;
    }
    let _ = backend;
    parse_uniform_scalar(bytes, out, ctr);
}

/// Rejection-samples an NTT-domain polynomial from `stream`, reading whole
/// XOF blocks. The result is in `backend`'s NTT layout.
pub fn sample_uniform(backend: Backend, stream: &mut XofStream) -> NttPoly {
    let mut coeffs = [0i16; N];
    let mut ctr = 0;
    let mut block = [0u8; XOF_BLOCK];
    while ctr < N {
        stream.read(&mut block);
        parse_uniform(backend, &block, &mut coeffs, &mut ctr);
    }
    NttPoly::from_bit_reversed(coeffs).with_layout(backend.ntt_layout())
}

/// Centered binomial sample from exactly `64 * eta` bytes.
pub fn sample_cbd(bytes: &[u8], eta: usize) -> Result<Poly> {
    if eta != 2 && eta != 3 {
        return Err(Error::InvalidParameter(format!("eta must be 2 or 3, got {eta}")));
    }
    if bytes.len() != 64 * eta {
        return Err(Error::InvalidParameter(format!(
            "cbd with eta = {eta} needs {} bytes, got {}",
            64 * eta,
            bytes.len()
        )));
    }
    let mut p = Poly::zero();
    if eta == 2 {
        for (w, chunk) in bytes.chunks_exact(4).enumerate() {
            let t = u32::from_le_bytes(chunk.try_into().unwrap());
            let d = (t & 0x5555_5555) + ((t >> 1) & 0x5555_5555);
            for j in 0..8 {
                let a = ((d >> (4 * j)) & 3) as i16;
                let b = ((d >> (4 * j + 2)) & 3) as i16;
                p.coeffs[8 * w + j] = a - b;
            }
        }
    } else {
        for (w, chunk) in bytes.chunks_exact(3).enumerate() {
            let t = chunk[0] as u32 | (chunk[1] as u32) << 8 | (chunk[2] as u32) << 16;
            let d = (t & 0x24_9249) + ((t >> 1) & 0x24_9249) + ((t >> 2) & 0x24_9249);
            for j in 0..4 {
                let a = ((d >> (6 * j)) & 7) as i16;
                let b = ((d >> (6 * j + 3)) & 7) as i16;
                p.coeffs[4 * w + j] = a - b;
            }
        }
    }
    Ok(p)
}

/// PRF output `SHAKE256(sigma || nonce)` for a run of nonces, batched
/// through the 8-way sponge when two or more are requested. Stream `i`
/// has length `lens[i]`.
pub fn prf_many(backend: Backend, sigma: &[u8; 32], first_nonce: u8, lens: &[usize]) -> Vec<Vec<u8>> {
    let inputs: Vec<[u8; 33]> = (0..lens.len())
        .map(|i| {
            let mut b = [0u8; 33];
            b[..32].copy_from_slice(sigma);
            b[32] = first_nonce.wrapping_add(i as u8);
            b
        })
        .collect();
    let refs: Vec<&[u8]> = inputs.iter().map(|b| b.as_slice()).collect();
    let longest = lens.iter().copied().max().unwrap_or(0);
    let mut out = hash_many(backend, Variant::Shake256, &refs, longest).expect("shake has no fixed length");
    for (o, &l) in out.iter_mut().zip(lens) {
        o.truncate(l);
    }
    out
}

/// Noise polynomials with nonces `first_nonce..`, eta per polynomial.
pub fn sample_noise(backend: Backend, sigma: &[u8; 32], first_nonce: u8, etas: &[usize]) -> Result<Vec<Poly>> {
    Ok(sample_noise_many(backend, &[sigma], first_nonce, etas)?.pop().expect("one seed"))
}

/// [`sample_noise`] for several seeds, with all PRF streams sharing
/// 8-way batches.
pub fn sample_noise_many(
    backend: Backend,
    sigmas: &[&[u8; 32]],
    first_nonce: u8,
    etas: &[usize],
) -> Result<Vec<Vec<Poly>>> {
    let inputs: Vec<[u8; 33]> = sigmas
        .iter()
        .flat_map(|sigma| {
            (0..etas.len()).map(move |i| {
                let mut b = [0u8; 33];
                b[..32].copy_from_slice(*sigma);
                b[32] = first_nonce.wrapping_add(i as u8);
                b
            })
        })
        .collect();
    if etas.is_empty() {
        return Ok(vec![Vec::new(); sigmas.len()]);
    }
    let refs: Vec<&[u8]> = inputs.iter().map(|b| b.as_slice()).collect();
    let longest = etas.iter().map(|&e| 64 * e).max().unwrap_or(0);
    let out = hash_many(backend, Variant::Shake256, &refs, longest)?;
    out.chunks(etas.len())
        .map(|streams| streams.iter().zip(etas).map(|(b, &eta)| sample_cbd(&b[..64 * eta], eta)).collect())
        .collect()
}

/// `k x k` matrix of NTT-domain polynomials.
pub type PolyMatrix = Vec<Vec<NttPoly>>;

fn check_k(k: usize) -> Result<()> {
    if (2..=4).contains(&k) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("matrix rank must be 2, 3 or 4, got {k}")))
    }
}

fn seed_indices(i: usize, j: usize, transposed: bool) -> (u8, u8) {
    // A[i][j] comes from rho || j || i.
    if transposed {
        (i as u8, j as u8)
    } else {
        (j as u8, i as u8)
    }
}

/// One XOF stream per entry, read in order.
pub fn expand_matrix_sequential(backend: Backend, rho: &[u8; 32], k: usize, transposed: bool) -> Result<PolyMatrix> {
    check_k(k)?;
    Ok((0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let (a, b) = seed_indices(i, j, transposed);
                    sample_uniform(backend, &mut XofStream::new(rho, a, b))
                })
                .collect()
        })
        .collect())
}

/// Generates the `k^2` streams eight at a time in lockstep.
pub fn expand_matrix_batched(backend: Backend, rho: &[u8; 32], k: usize, transposed: bool) -> Result<PolyMatrix> {
    Ok(expand_matrices(backend, &[rho], k, transposed)?.pop().expect("one seed"))
}

/// One matrix per seed, with the streams of all seeds packed into full
/// 8-way batches.
pub fn expand_matrices(backend: Backend, rhos: &[&[u8; 32]], k: usize, transposed: bool) -> Result<Vec<PolyMatrix>> {
    check_k(k)?;
    let cells: Vec<(usize, usize, usize)> = (0..rhos.len())
        .flat_map(|m| (0..k).flat_map(move |i| (0..k).map(move |j| (m, i, j))))
        .collect();
    let mut polys = vec![NttPoly::zero(backend.ntt_layout()); cells.len()];
    let mut bufs: Vec<Vec<u8>> = (0..BATCH_WIDTH).map(|_| Vec::with_capacity(3 * XOF_BLOCK)).collect();
    for (c, chunk) in cells.chunks(BATCH_WIDTH).enumerate() {
        let seeds: Vec<[u8; 34]> = chunk
            .iter()
            .map(|&(m, i, j)| {
                let (a, b) = seed_indices(i, j, transposed);
                let mut s = [0u8; 34];
                s[..32].copy_from_slice(rhos[m]);
                s[32] = a;
                s[33] = b;
                s
            })
            .collect();
        let refs: Vec<&[u8]> = seeds.iter().map(|s| s.as_slice()).collect();
        let mut state = BatchKeccakState::absorb(backend, Variant::Shake128, &refs)?;
        let mut coeffs = vec![[0i16; N]; chunk.len()];
        let mut ctrs = vec![0usize; chunk.len()];
        // Three blocks cover 256 candidates most of the time.
        let mut blocks = 3;
        while ctrs.iter().any(|&c| c < N) {
            for b in bufs.iter_mut() {
                b.clear();
            }
            for _ in 0..blocks {
                state.squeeze_block(&mut bufs);
            }
            for (l, buf) in bufs.iter().enumerate().take(chunk.len()) {
                parse_uniform(backend, buf, &mut coeffs[l], &mut ctrs[l]);
            }
            blocks = 1;
        }
        for (l, p) in coeffs.iter().enumerate() {
            polys[c * BATCH_WIDTH + l] = NttPoly::from_bit_reversed(*p).with_layout(backend.ntt_layout());
        }
    }
    Ok(polys.chunks(k * k).map(|m| m.chunks(k).map(|r| r.to_vec()).collect()).collect())
}

/// The public matrix `A` (or its transpose) for seed `rho`. The vector
/// backend generates streams in batches; the output is identical.
pub fn expand_matrix(backend: Backend, rho: &[u8; 32], k: usize, transposed: bool) -> Result<PolyMatrix> {
    if backend.is_vector() {
        expand_matrix_batched(backend, rho, k, transposed)
    } else {
        expand_matrix_sequential(backend, rho, k, transposed)
    }
}


#[cfg(test)]
mod tests;
