//! Reference backend, one coefficient at a time. NTT-domain values are kept
//! in plain bit-reversed residue order: `[2r]` and `[2r + 1]` are the two
//! coefficients of residue `r`.

use super::tables::{forward_index, gamma, inverse_index, Twiddle, INTT_SCALE, MONT_SQ, TWIDDLES};
use super::{barrett_reduce, fqmul, fqmul_twiddle, montgomery_reduce};
use crate::params::N;

/// Lazy reduction schedule for the inverse transform, keyed by the layer just
/// completed (layer `s` has butterfly distance `2^s`). Entering the inverse
/// transform every coefficient is in `[0, q]`. Sums double the bound of the
/// upper half each layer; the lower half leaves every butterfly below `q`.
///
/// | after layer | coefficients reduced (i mod 2^(s+1)) | bound before reduction |
/// |-------------|--------------------------------------|------------------------|
/// | 3           | {0, 1}                               | 8q                     |
/// | 4           | {2, 3}                               | 8q                     |
/// | 5           | {4..7}                               | 8q                     |
/// | 6           | {0, 1, 8..15}                        | 8q                     |
///
/// Without these, the next layer would add two `8q` values (53264 > 2^15).
/// After layer 7 every coefficient is below `8q` and the final scaling accepts
/// any 16-bit input.
pub(crate) const fn lazy_reduce(layer: usize, i: usize) -> bool {
    match layer {
        3 => i % 16 < 2,
        4 => matches!(i % 32, 2 | 3),
        5 => matches!(i % 64, 4..=7),
        6 => matches!(i % 128, 0 | 1 | 8..=15),
        _ => false,
    }
}

#[inline(always)]
fn ct_butterfly(a: i16, b: i16, z: Twiddle) -> (i16, i16) {
    let t = fqmul_twiddle(b, z);
    (a.wrapping_add(t), a.wrapping_sub(t))
}

#[inline(always)]
fn gs_butterfly(a: i16, b: i16, z: Twiddle) -> (i16, i16) {
    let sum = a.wrapping_add(b);
    let diff = b.wrapping_sub(a);
    (sum, fqmul_twiddle(diff, z))
}

pub(crate) fn ntt(c: &mut [i16; N]) {
    let mut len = 128;
    while len >= 2 {
        for start in (0..N).step_by(2 * len) {
            let z = TWIDDLES.forward[forward_index(len, start)];
            for j in start..start + len {
                let (a, b) = ct_butterfly(c[j], c[j + len], z);
                c[j] = a;
                c[j + len] = b;
            }
        }
        len >>= 1;
    }
}

pub(crate) fn intt(c: &mut [i16; N]) {
    for x in c.iter_mut() {
        *x = barrett_reduce(*x);
    }
    let mut len = 2;
    let mut layer = 1;
    while len <= 128 {
        for start in (0..N).step_by(2 * len) {
            let z = TWIDDLES.inverse[inverse_index(len, start)];
            for j in start..start + len {
                let (a, b) = gs_butterfly(c[j], c[j + len], z);
                c[j] = a;
                c[j + len] = b;
            }
        }
        if (3..=6).contains(&layer) {
            for (i, x) in c.iter_mut().enumerate() {
                if lazy_reduce(layer, i) {
                    *x = barrett_reduce(*x);
                }
            }
        }
        len <<= 1;
        layer += 1;
    }
    for x in c.iter_mut() {
        *x = fqmul(*x, INTT_SCALE);
    }
}

/// Product of two degree-1 residues modulo `x^2 - gamma`, with a factor
/// `2^-16` left over.
#[inline(always)]
pub(crate) fn basemul_pair(a0: i16, a1: i16, b0: i16, b1: i16, g: i16) -> (i16, i16) {
    let r0 = fqmul(fqmul(a1, b1), g).wrapping_add(fqmul(a0, b0));
    let r1 = fqmul(a0, b1).wrapping_add(fqmul(a1, b0));
    (r0, r1)
}

pub(crate) fn basemul(out: &mut [i16; N], a: &[i16; N], b: &[i16; N]) {
    for r in 0..N / 2 {
        let (r0, r1) = basemul_pair(a[2 * r], a[2 * r + 1], b[2 * r], b[2 * r + 1], gamma(r));
        out[2 * r] = fqmul(r0, MONT_SQ);
        out[2 * r + 1] = fqmul(r1, MONT_SQ);
    }
}

pub(crate) fn add(out: &mut [i16; N], a: &[i16; N], b: &[i16; N]) {
    for i in 0..N {
        debug_assert!((a[i] as i32 + b[i] as i32).abs() < 1 << 15, "add overflow");
        out[i] = a[i].wrapping_add(b[i]);
    }
}

pub(crate) fn sub(out: &mut [i16; N], a: &[i16; N], b: &[i16; N]) {
    for i in 0..N {
        debug_assert!((a[i] as i32 - b[i] as i32).abs() < 1 << 15, "sub overflow");
        out[i] = a[i].wrapping_sub(b[i]);
    }
}

pub(crate) fn reduce(c: &mut [i16; N]) {
    for x in c.iter_mut() {
        *x = barrett_reduce(*x);
    }
}

pub(crate) fn to_mont(c: &mut [i16; N]) {
    for x in c.iter_mut() {
        *x = fqmul(*x, MONT_SQ);
    }
}

pub(crate) fn from_mont(c: &mut [i16; N]) {
    for x in c.iter_mut() {
        *x = montgomery_reduce(*x as i32);
    }
}

/// 32-bit shadow of the transforms: recomputes every butterfly in wide
/// arithmetic and reports the first intermediate that leaves the 16-bit range.
pub mod shadow {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct Overflow {
        pub layer: usize,
        pub index: usize,
        pub value: i32,
    }

    fn check(v: i32, layer: usize, index: usize) -> Result<i16, Overflow> {
        if (i16::MIN as i32..=i16::MAX as i32).contains(&v) {
            Ok(v as i16)
        } else {
            Err(Overflow { layer, index, value: v })
        }
    }

    fn wide_fqmul(x: i32, z: Twiddle, layer: usize, index: usize) -> Result<i32, Overflow> {
        let x = check(x, layer, index)?;
        Ok(fqmul_twiddle(x, z) as i32)
    }

    pub fn ntt(input: &[i16; N]) -> Result<[i16; N], Overflow> {
        let mut c: Vec<i32> = input.iter().map(|&x| x as i32).collect();
        let mut len = 128;
        let mut layer = 7;
        while len >= 2 {
            for start in (0..N).step_by(2 * len) {
                let z = TWIDDLES.forward[forward_index(len, start)];
                for j in start..start + len {
                    let t = wide_fqmul(c[j + len], z, layer, j + len)?;
                    let (a, b) = (c[j] + t, c[j] - t);
                    check(a, layer, j)?;
                    check(b, layer, j + len)?;
                    c[j] = a;
                    c[j + len] = b;
                }
            }
            len >>= 1;
            layer -= 1;
        }
        let mut out = [0i16; N];
        for (o, &v) in out.iter_mut().zip(&c) {
            *o = v as i16;
        }
        Ok(out)
    }

    pub fn intt(input: &[i16; N]) -> Result<[i16; N], Overflow> {
        let mut c: Vec<i32> = input.iter().map(|&x| barrett_reduce(x) as i32).collect();
        let mut len = 2;
        let mut layer = 1;
        while len <= 128 {
            for start in (0..N).step_by(2 * len) {
                let z = TWIDDLES.inverse[inverse_index(len, start)];
                for j in start..start + len {
                    let (a, b) = (c[j], c[j + len]);
                    let sum = a + b;
                    check(sum, layer, j)?;
                    let diff = b - a;
                    c[j] = sum;
                    c[j + len] = wide_fqmul(diff, z, layer, j + len)?;
                }
            }
            for (i, x) in c.iter_mut().enumerate() {
                if lazy_reduce(layer, i) {
                    *x = barrett_reduce(check(*x, layer, i)?) as i32;
                }
            }
            len <<= 1;
            layer += 1;
        }
        let mut out = [0i16; N];
        for (i, (o, &v)) in out.iter_mut().zip(&c).enumerate() {
            *o = fqmul(check(v, 8, i)?, INTT_SCALE);
        }
        Ok(out)
    }
}
