//! Keccak-p[1600,24], the SHA-3 hashes and SHAKE XOFs ML-KEM uses, and a
//! batched sponge that advances up to eight states in lockstep.

mod batch;

#[cfg(target_arch = "x86_64")]
mod avx512;

pub use batch::{batch_absorb_squeeze, hash_many, BatchKeccakState, BATCH_WIDTH};

pub(crate) const ROUND_CONSTANTS: [u64; 24] = [
    0x0000000000000001,
    0x0000000000008082,
    0x800000000000808a,
    0x8000000080008000,
    0x000000000000808b,
    0x0000000080000001,
    0x8000000080008081,
    0x8000000000008009,
    0x000000000000008a,
    0x0000000000000088,
    0x0000000080008009,
    0x000000008000000a,
    0x000000008000808b,
    0x800000000000008b,
    0x8000000000008089,
    0x8000000000008003,
    0x8000000000008002,
    0x8000000000000080,
    0x000000000000800a,
    0x800000008000000a,
    0x8000000080008081,
    0x8000000000008080,
    0x0000000080000001,
    0x8000000080008008,
];

/// Rotation offset of lane `x + 5y`.
pub(crate) const RHO: [u32; 25] = [
    0, 1, 62, 28, 27, 36, 44, 6, 55, 20, 3, 10, 43, 25, 39, 41, 45, 15, 21, 8, 18, 2, 61, 56, 14,
];

/// Rho and pi together are one 24-cycle through the lanes other than
/// the origin. Step `t` moves the previous lane of the cycle into
/// `PI_CHAIN[t]`, rotated by `RHO_CHAIN[t]`.
pub(crate) const PI_CHAIN: [usize; 24] = chain().0;
pub(crate) const RHO_CHAIN: [u32; 24] = chain().1;

const fn chain() -> ([usize; 24], [u32; 24]) {
    let mut dest = [0usize; 24];
    let mut rot = [0u32; 24];
    let mut pos = 1;
    let mut t = 0;
    while t < 24 {
        // pi sends lane (x, y) to (y, 2x + 3y).
        let (x, y) = (pos % 5, pos / 5);
        let next = y + 5 * ((2 * x + 3 * y) % 5);
        dest[t] = next;
        rot[t] = RHO[pos];
        pos = next;
        t += 1;
    }
    (dest, rot)
}

macro_rules! unroll5 {
    ($i:ident, $body:block) => {{
        { let $i = 0usize; $body }
        { let $i = 1usize; $body }
        { let $i = 2usize; $body }
        { let $i = 3usize; $body }
        { let $i = 4usize; $body }
    }};
}

macro_rules! unroll24 {
    ($i:ident, $body:block) => {{
        unroll5!(j, { let $i = j; $body });
        unroll5!(j, { let $i = 5 + j; $body });
        unroll5!(j, { let $i = 10 + j; $body });
        unroll5!(j, { let $i = 15 + j; $body });
        { let $i = 20usize; $body }
        { let $i = 21usize; $body }
        { let $i = 22usize; $body }
        { let $i = 23usize; $body }
    }};
}

pub(crate) use {unroll24, unroll5};

/// The 24-round Keccak-f[1600] permutation on lanes indexed `x + 5y`.
#[allow(unused_assignments)]
pub fn keccak_p1600(a: &mut [u64; 25]) {
    for rc in ROUND_CONSTANTS {
        let mut c = [0u64; 5];
        unroll5!(x, {
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        });
        unroll5!(x, {
            let d = c[(x + 4) % 5] ^ c[(x + 1) % 5].rotate_left(1);
            unroll5!(y, {
                a[x + 5 * y] ^= d;
            });
        });
        let mut last = a[1];
        unroll24!(t, {
            let tmp = a[PI_CHAIN[t]];
            a[PI_CHAIN[t]] = last.rotate_left(RHO_CHAIN[t]);
            last = tmp;
        });
        unroll5!(y, {
            let row = [a[5 * y], a[5 * y + 1], a[5 * y + 2], a[5 * y + 3], a[5 * y + 4]];
            unroll5!(x, {
                a[5 * y + x] = row[x] ^ (!row[(x + 1) % 5] & row[(x + 2) % 5]);
            });
        });
        a[0] ^= rc;
    }
}

/// The four SHA-3 family functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Sha3_256,
    Sha3_512,
    Shake128,
    Shake256,
}

impl Variant {
    pub const fn rate(self) -> usize {
        match self {
            Variant::Sha3_256 => 136,
            Variant::Sha3_512 => 72,
            Variant::Shake128 => 168,
            Variant::Shake256 => 136,
        }
    }

    pub const fn domain(self) -> u8 {
        match self {
            Variant::Sha3_256 | Variant::Sha3_512 => 0x06,
            Variant::Shake128 | Variant::Shake256 => 0x1f,
        }
    }

    /// Digest length for the fixed-output variants.
    pub const fn digest_len(self) -> Option<usize> {
        match self {
            Variant::Sha3_256 => Some(32),
            Variant::Sha3_512 => Some(64),
            _ => None,
        }
    }
}

/// Feeds `bytes`, placed at byte `offset` of the state, to `xor(w, v)` as
/// little-endian 64-bit values `v` for word `w`.
#[inline]
pub(crate) fn xor_bytes_with(mut xor: impl FnMut(usize, u64), offset: usize, bytes: &[u8]) {
    let mut pos = offset;
    let mut rest = bytes;
    while !pos.is_multiple_of(8) && !rest.is_empty() {
        xor(pos / 8, (rest[0] as u64) << (8 * (pos % 8)));
        pos += 1;
        rest = &rest[1..];
    }
    let mut words = rest.chunks_exact(8);
    for w in &mut words {
        xor(pos / 8, u64::from_le_bytes(w.try_into().unwrap()));
        pos += 8;
    }
    for &b in words.remainder() {
        xor(pos / 8, (b as u64) << (8 * (pos % 8)));
        pos += 1;
    }
}

#[inline]
pub(crate) fn xor_bytes_into_lanes(lanes: &mut [u64; 25], offset: usize, bytes: &[u8]) {
    xor_bytes_with(|w, v| lanes[w] ^= v, offset, bytes);
}

#[inline]
pub(crate) fn extract_bytes(lanes: &[u64; 25], offset: usize, out: &mut [u8]) {
    let mut pos = offset;
    let mut k = 0;
    while !pos.is_multiple_of(8) && k < out.len() {
        out[k] = (lanes[pos / 8] >> (8 * (pos % 8))) as u8;
        pos += 1;
        k += 1;
    }
    let mut words = out[k..].chunks_exact_mut(8);
    for w in &mut words {
        w.copy_from_slice(&lanes[pos / 8].to_le_bytes());
        pos += 8;
    }
    for o in words.into_remainder() {
        *o = (lanes[pos / 8] >> (8 * (pos % 8))) as u8;
        pos += 1;
    }
}

/// A sponge over Keccak-p[1600,24].
#[derive(Clone)]
pub struct KeccakState {
    lanes: [u64; 25],
    rate: usize,
    pos: usize,
    domain: u8,
    squeezing: bool,
}

impl KeccakState {
    pub fn new(variant: Variant) -> Self {
        KeccakState {
            lanes: [0; 25],
            rate: variant.rate(),
            pos: 0,
            domain: variant.domain(),
            squeezing: false,
        }
    }

    pub fn rate(&self) -> usize {
        self.rate
    }

    pub fn lanes(&self) -> &[u64; 25] {
        &self.lanes
    }

    pub fn absorb(&mut self, mut data: &[u8]) {
        assert!(!self.squeezing, "absorb after squeeze");
        while !data.is_empty() {
            let take = (self.rate - self.pos).min(data.len());
            xor_bytes_into_lanes(&mut self.lanes, self.pos, &data[..take]);
            self.pos += take;
            data = &data[take..];
            if self.pos == self.rate {
                keccak_p1600(&mut self.lanes);
                self.pos = 0;
            }
        }
    }

    fn finalize(&mut self) {
        xor_bytes_into_lanes(&mut self.lanes, self.pos, &[self.domain]);
        xor_bytes_into_lanes(&mut self.lanes, self.rate - 1, &[0x80]);
        keccak_p1600(&mut self.lanes);
        self.pos = 0;
        self.squeezing = true;
    }

    pub fn squeeze(&mut self, mut out: &mut [u8]) {
        if !self.squeezing {
            self.finalize();
        }
        while !out.is_empty() {
            if self.pos == self.rate {
                keccak_p1600(&mut self.lanes);
                self.pos = 0;
            }
            let take = (self.rate - self.pos).min(out.len());
            extract_bytes(&self.lanes, self.pos, &mut out[..take]);
            self.pos += take;
            out = &mut out[take..];
        }
    }
}

/// SHA3-256 or SHA3-512 of the concatenation of `parts`.
pub fn sha3_digest(variant: Variant, parts: &[&[u8]]) -> Vec<u8> {
    let len = variant.digest_len().expect("sha3_digest needs a fixed-output variant");
    let mut st = KeccakState::new(variant);
    for p in parts {
        st.absorb(p);
    }
    let mut out = vec![0u8; len];
    st.squeeze(&mut out);
    out
}

pub fn sha3_256(parts: &[&[u8]]) -> [u8; 32] {
    let mut st = KeccakState::new(Variant::Sha3_256);
    for p in parts {
        st.absorb(p);
    }
    let mut out = [0u8; 32];
    st.squeeze(&mut out);
    out
}

pub fn sha3_512(parts: &[&[u8]]) -> [u8; 64] {
    let mut st = KeccakState::new(Variant::Sha3_512);
    for p in parts {
        st.absorb(p);
    }
    let mut out = [0u8; 64];
    st.squeeze(&mut out);
    out
}

/// SHAKE128 or SHAKE256 output of length `outlen`.
pub fn shake_xof(variant: Variant, msg: &[u8], outlen: usize) -> Vec<u8> {
    assert!(variant.digest_len().is_none(), "shake_xof needs an XOF variant");
    let mut st = KeccakState::new(variant);
    st.absorb(msg);
    let mut out = vec![0u8; outlen];
    st.squeeze(&mut out);
    out
}

pub fn shake256(parts: &[&[u8]], out: &mut [u8]) {
    let mut st = KeccakState::new(Variant::Shake256);
    for p in parts {
        st.absorb(p);
    }
    st.squeeze(out);
}
