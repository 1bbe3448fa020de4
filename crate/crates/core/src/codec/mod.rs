//! Bit packing, lossy compression and the byte layouts of keys and
//! ciphertexts.

use crate::error::{Error, Result};
use crate::params::{ParameterSet, N, POLY_BYTES, Q, SYM_BYTES};
use crate::polyring::{canonical, NttPoly, Poly};

/// `round(2^d * x / q) mod 2^d`, rounding halves up. `x` must be in `[0, q)`.
#[inline]
pub fn compress(x: u16, d: usize) -> u16 {
    debug_assert!(x < Q as u16 && (1..=11).contains(&d));
    let num = ((x as u32) << (d + 1)) + Q as u32;
    ((num / (2 * Q as u32)) & ((1 << d) - 1)) as u16
}

/// `round(q * y / 2^d)`, rounding halves up.
#[inline]
pub fn decompress(y: u16, d: usize) -> u16 {
    debug_assert!((y as u32) < (1 << d));
    ((Q as u32 * y as u32 + (1 << (d - 1))) >> d) as u16
}

pub fn compress_poly(f: &Poly, d: usize) -> Poly {
    let mut out = Poly::zero();
    for (o, &c) in out.coeffs.iter_mut().zip(&f.coeffs) {
        *o = compress(canonical(c) as u16, d) as i16;
    }
    out
}

pub fn decompress_poly(f: &Poly, d: usize) -> Poly {
    let mut out = Poly::zero();
    for (o, &c) in out.coeffs.iter_mut().zip(&f.coeffs) {
        *o = decompress(c as u16, d) as i16;
    }
    out
}

fn check_d(d: usize) -> Result<()> {
    if (1..=12).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("bit width must be in 1..=12, got {d}")))
    }
}

/// Packs 256 `d`-bit values little-endian into `32 * d` bytes.
pub fn byte_encode(f: &[i16; N], d: usize) -> Result<Vec<u8>> {
    check_d(d)?;
    let mut out = Vec::with_capacity(32 * d);
    let mut acc = 0u32;
    let mut bits = 0;
    for (i, &c) in f.iter().enumerate() {
        if c < 0 || c as u32 >= 1 << d {
            return Err(Error::InvalidArgument(format!(
                "coefficient {i} = {c} does not fit in {d} bits"
            )));
        }
        acc |= (c as u32) << bits;
        bits += d;
        while bits >= 8 {
            out.push(acc as u8);
            acc >>= 8;
            bits -= 8;
        }
    }
    Ok(out)
}

/// Inverse of [`byte_encode`]. With `d = 12` values are reduced mod q.
pub fn byte_decode(b: &[u8], d: usize) -> Result<Poly> {
    check_d(d)?;
    if b.len() != 32 * d {
        return Err(Error::InvalidArgument(format!(
            "{d}-bit decode needs {} bytes, got {}",
            32 * d,
            b.len()
        )));
    }
    let mut f = Poly::zero();
    let mask = (1u32 << d) - 1;
    let mut acc = 0u32;
    let mut bits = 0;
    let mut bytes = b.iter();
    for c in f.coeffs.iter_mut() {
        while bits < d {
            acc |= (*bytes.next().unwrap() as u32) << bits;
            bits += 8;
        }
        let mut v = (acc & mask) as i16;
        acc >>= d;
        bits -= d;
        if d == 12 {
            v = canonical(v);
        }
        *c = v;
    }
    Ok(f)
}

/// The serialized objects, for error reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Ek,
    DkPke,
    Dk,
    Ct,
    CtTagged,
}

impl Role {
    pub const fn as_str(self) -> &'static str {
        match self {
            Role::Ek => "ek",
            Role::DkPke => "dk_pke",
            Role::Dk => "dk",
            Role::Ct => "ct",
            Role::CtTagged => "ct_tagged",
        }
    }
}

/// A byte string whose length has been checked against its role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireBytes {
    pub role: Role,
    pub payload: Vec<u8>,
}

impl WireBytes {
    pub fn new(role: Role, payload: Vec<u8>, expected: usize) -> Result<Self> {
        check_len(role, expected, payload.len())?;
        Ok(WireBytes { role, payload })
    }
}

pub fn check_len(role: Role, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::MalformedInput {
            role: role.as_str(),
            expected,
            actual,
        })
    }
}

/// Concatenated 12-bit encodings of canonical NTT-domain polynomials.
pub fn encode_ntt_vector(v: &[NttPoly]) -> Vec<u8> {
    let mut out = Vec::with_capacity(v.len() * POLY_BYTES);
    for p in v {
        let c = p.canonical().to_bit_reversed();
        out.extend(byte_encode(&c, 12).expect("canonical coefficients fit in 12 bits"));
    }
    out
}

pub fn decode_ntt_vector(b: &[u8]) -> Vec<NttPoly> {
    b.chunks_exact(POLY_BYTES)
        .map(|c| NttPoly::from_bit_reversed(byte_decode(c, 12).expect("chunk length is exact").coeffs))
        .collect()
}

/// `ek = encode(t_hat) || rho`.
pub fn serialize_ek(t_hat: &[NttPoly], rho: &[u8; 32]) -> Vec<u8> {
    let mut out = encode_ntt_vector(t_hat);
    out.extend_from_slice(rho);
    out
}

pub fn deserialize_ek(set: &ParameterSet, ek: &[u8]) -> Result<(Vec<NttPoly>, [u8; 32])> {
    check_len(Role::Ek, set.ek_len(), ek.len())?;
    let split = set.k * POLY_BYTES;
    Ok((decode_ntt_vector(&ek[..split]), ek[split..].try_into().unwrap()))
}

pub fn serialize_dk_pke(s_hat: &[NttPoly]) -> Vec<u8> {
    encode_ntt_vector(s_hat)
}

pub fn deserialize_dk_pke(set: &ParameterSet, dk: &[u8]) -> Result<Vec<NttPoly>> {
    check_len(Role::DkPke, set.dk_pke_len(), dk.len())?;
    Ok(decode_ntt_vector(dk))
}

/// `compress_du(u) || compress_dv(v)`; inputs may be any representatives.
pub fn serialize_ct(set: &ParameterSet, u: &[Poly], v: &Poly) -> Vec<u8> {
    let mut out = Vec::with_capacity(set.ct_len());
    for p in u {
        out.extend(byte_encode(&compress_poly(p, set.du).coeffs, set.du).expect("compressed values fit"));
    }
    out.extend(byte_encode(&compress_poly(v, set.dv).coeffs, set.dv).expect("compressed values fit"));
    out
}

/// Decodes and decompresses `(u, v)`.
pub fn deserialize_ct(set: &ParameterSet, ct: &[u8]) -> Result<(Vec<Poly>, Poly)> {
    check_len(Role::Ct, set.ct_len(), ct.len())?;
    let ub = 32 * set.du;
    let u = ct[..set.ct_u_len()]
        .chunks_exact(ub)
        .map(|c| decompress_poly(&byte_decode(c, set.du).expect("chunk length is exact"), set.du))
        .collect();
    let v = decompress_poly(&byte_decode(&ct[set.ct_u_len()..], set.dv)?, set.dv);
    Ok((u, v))
}

/// `ct || tag`.
pub fn serialize_ct_tagged(ct: &[u8], tag: &[u8; 32]) -> Vec<u8> {
    let mut out = ct.to_vec();
    out.extend_from_slice(tag);
    out
}

pub fn split_ct_tagged<'a>(set: &ParameterSet, bytes: &'a [u8]) -> Result<(&'a [u8], [u8; 32])> {
    check_len(Role::CtTagged, set.ct_len() + SYM_BYTES, bytes.len())?;
    let (ct, tag) = bytes.split_at(set.ct_len());
    Ok((ct, tag.try_into().unwrap()))
}

/// The pieces of a decapsulation key. Which optional parts are present
/// depends on the transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DkParts<'a> {
    pub dk_pke: &'a [u8],
    pub ek: &'a [u8],
    pub h_ek: Option<[u8; 32]>,
    pub z: Option<[u8; 32]>,
}

pub fn dk_len(set: &ParameterSet, with_hash: bool, with_z: bool) -> usize {
    set.dk_pke_len() + set.ek_len() + SYM_BYTES * (with_hash as usize + with_z as usize)
}

/// `dk_pke || ek || [H(ek)] || [z]`.
pub fn serialize_dk(dk_pke: &[u8], ek: &[u8], h_ek: Option<&[u8; 32]>, z: Option<&[u8; 32]>) -> Vec<u8> {
    let mut out = Vec::with_capacity(dk_pke.len() + ek.len() + 64);
    out.extend_from_slice(dk_pke);
    out.extend_from_slice(ek);
    if let Some(h) = h_ek {
        out.extend_from_slice(h);
    }
    if let Some(z) = z {
        out.extend_from_slice(z);
    }
    out
}

pub fn deserialize_dk<'a>(
    set: &ParameterSet,
    dk: &'a [u8],
    with_hash: bool,
    with_z: bool,
) -> Result<DkParts<'a>> {
    check_len(Role::Dk, dk_len(set, with_hash, with_z), dk.len())?;
    let (dk_pke, rest) = dk.split_at(set.dk_pke_len());
    let (ek, mut rest) = rest.split_at(set.ek_len());
    let mut take = || {
        let (a, b) = rest.split_at(SYM_BYTES);
        rest = b;
        <[u8; 32]>::try_from(a).unwrap()
    };
    let h_ek = with_hash.then(&mut take);
    let z = with_z.then(&mut take);
    Ok(DkParts { dk_pke, ek, h_ek, z })
}

#[cfg(test)]
mod tests;
