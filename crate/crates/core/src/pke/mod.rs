//! K-PKE, the IND-CPA encryption scheme underneath every KEM transform.

use std::cell::Cell;

use zeroize::{Zeroize, Zeroizing};

use crate::codec::{
    byte_decode, byte_encode, check_len, decompress_poly, deserialize_ct, deserialize_dk_pke, deserialize_ek,
    serialize_ct, serialize_dk_pke, serialize_ek, Role,
};
use crate::error::Result;
use crate::keccak::{hash_many, sha3_512, Variant};
use crate::params::{ParameterSet, SYM_BYTES};
use crate::polyring::{Backend, NttPoly, Poly};
use crate::sampling::{expand_matrices, expand_matrix, sample_noise, sample_noise_many, PolyMatrix};

thread_local! {
    static ENCRYPT_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of [`kpke_encrypt`] calls made on this thread.
pub fn encrypt_calls() -> u64 {
    ENCRYPT_CALLS.with(|c| c.get())
}

#[derive(Clone)]
pub struct PkeKeyPair {
    pub ek: Vec<u8>,
    pub dk: Zeroizing<Vec<u8>>,
}

/// Sum of `basemul(a[j], b[j])`, reduced.
fn inner_product(backend: Backend, a: &[NttPoly], b: &[NttPoly]) -> NttPoly {
    let mut acc = backend.basemul(&a[0], &b[0]);
    for (x, y) in a.iter().zip(b).skip(1) {
        acc = backend.ntt_add(&acc, &backend.basemul(x, y));
    }
    backend.ntt_reduce(&acc)
}

fn to_layout(backend: Backend, v: Vec<NttPoly>) -> Vec<NttPoly> {
    v.into_iter().map(|p| p.with_layout(backend.ntt_layout())).collect()
}

/// Deterministic key generation from the 32-byte seed `d`.
pub fn kpke_keygen(backend: Backend, set: &ParameterSet, d: &[u8; 32]) -> PkeKeyPair {
    let mut g = sha3_512(&[d, &[set.k as u8]]);
    let rho: [u8; 32] = g[..32].try_into().unwrap();
    let mut sigma = Zeroizing::new([0u8; 32]);
    sigma.copy_from_slice(&g[32..]);
    g.zeroize();
    keygen_from_seeds(backend, set, &rho, &sigma)
}

/// Key generation from the expanded seeds `(rho, sigma)`.
pub(crate) fn keygen_from_seeds(backend: Backend, set: &ParameterSet, rho: &[u8; 32], sigma: &[u8; 32]) -> PkeKeyPair {
    let a = expand_matrix(backend, rho, set.k, false).expect("parameter sets use k in 2..=4");
    let noise = sample_noise(backend, sigma, 0, &vec![set.eta1; 2 * set.k]).expect("eta is 2 or 3");
    keygen_finish(backend, set, rho, &a, noise)
}

fn keygen_finish(backend: Backend, set: &ParameterSet, rho: &[u8; 32], a: &PolyMatrix, mut noise: Vec<Poly>) -> PkeKeyPair {
    let s_hat: Vec<NttPoly> = noise[..set.k].iter().map(|p| backend.ntt(p)).collect();
    let e_hat: Vec<NttPoly> = noise[set.k..].iter().map(|p| backend.ntt(p)).collect();
    noise.iter_mut().for_each(|p| p.coeffs.zeroize());

    let t_hat: Vec<NttPoly> = (0..set.k)
        .map(|i| backend.ntt_add(&inner_product(backend, &a[i], &s_hat), &e_hat[i]))
        .collect();
    PkeKeyPair {
        ek: serialize_ek(&t_hat, rho),
        dk: Zeroizing::new(serialize_dk_pke(&s_hat)),
    }
}

/// [`kpke_keygen`] for several seeds at once: the seed hashes, matrix
/// streams and noise streams of all keys share 8-way Keccak batches.
/// Output `i` equals `kpke_keygen(backend, set, &ds[i])`.
pub fn kpke_keygen_many(backend: Backend, set: &ParameterSet, ds: &[[u8; 32]]) -> Vec<PkeKeyPair> {
    let inputs: Vec<[u8; 33]> = ds
        .iter()
        .map(|d| {
            let mut b = [0u8; 33];
            b[..32].copy_from_slice(d);
            b[32] = set.k as u8;
            b
        })
        .collect();
    let refs: Vec<&[u8]> = inputs.iter().map(|b| b.as_slice()).collect();
    let mut g = hash_many(backend, Variant::Sha3_512, &refs, 64).expect("64-byte digest");
    let rhos: Vec<[u8; 32]> = g.iter().map(|x| x[..32].try_into().unwrap()).collect();
    let sigmas: Vec<Zeroizing<[u8; 32]>> = g.iter().map(|x| Zeroizing::new(x[32..].try_into().unwrap())).collect();
    g.iter_mut().for_each(|x| x.zeroize());

    let rho_refs: Vec<&[u8; 32]> = rhos.iter().collect();
    let sigma_refs: Vec<&[u8; 32]> = sigmas.iter().map(|s| &**s).collect();
    let matrices = expand_matrices(backend, &rho_refs, set.k, false).expect("parameter sets use k in 2..=4");
    let noise = sample_noise_many(backend, &sigma_refs, 0, &vec![set.eta1; 2 * set.k]).expect("eta is 2 or 3");
    rhos.iter()
        .zip(&matrices)
        .zip(noise)
        .map(|((rho, a), n)| keygen_finish(backend, set, rho, a, n))
        .collect()
}

/// Deterministic encryption of `m` under `ek` with coins `r`.
pub fn kpke_encrypt(backend: Backend, set: &ParameterSet, ek: &[u8], m: &[u8; 32], r: &[u8; 32]) -> Result<Vec<u8>> {
    ENCRYPT_CALLS.with(|c| c.set(c.get() + 1));
    let (t_hat, rho) = deserialize_ek(set, ek)?;
    let t_hat = to_layout(backend, t_hat);
    let at = expand_matrix(backend, &rho, set.k, true)?;

    let mut etas = vec![set.eta1; set.k];
    etas.extend(std::iter::repeat_n(set.eta2, set.k + 1));
    let noise = sample_noise(backend, r, 0, &etas)?;
    let r_hat: Vec<NttPoly> = noise[..set.k].iter().map(|p| backend.ntt(p)).collect();
    let e1 = &noise[set.k..2 * set.k];
    let e2 = &noise[2 * set.k];

    let u: Vec<Poly> = (0..set.k)
        .map(|i| backend.add(&backend.intt(&inner_product(backend, &at[i], &r_hat)), &e1[i]))
        .collect();
    let mu = decompress_poly(&byte_decode(m, 1)?, 1);
    let v = backend.intt(&inner_product(backend, &t_hat, &r_hat));
    let v = backend.add(&backend.add(&v, e2), &mu);
    Ok(serialize_ct(set, &u, &v))
}

/// Decryption. Total: any well-sized ciphertext yields some message.
pub fn kpke_decrypt(backend: Backend, set: &ParameterSet, dk: &[u8], ct: &[u8]) -> Result<[u8; 32]> {
    let s_hat = to_layout(backend, deserialize_dk_pke(set, dk)?);
    let (u, v) = deserialize_ct(set, ct)?;
    let u_hat: Vec<NttPoly> = u.iter().map(|p| backend.ntt(p)).collect();
    let w = backend.sub(&v, &backend.intt(&inner_product(backend, &s_hat, &u_hat)));
    let m = crate::codec::compress_poly(&w, 1);
    let bytes = byte_encode(&m.coeffs, 1).expect("1-bit values");
    check_len(Role::Ct, SYM_BYTES, bytes.len())?;
    Ok(bytes.try_into().unwrap())
}

#[cfg(test)]
mod tests;
