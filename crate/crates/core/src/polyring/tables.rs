//! Twiddle constants, computed at compile time from the primitive 256-th
//! root of unity 17.

use crate::params::Q;

/// `q^-1 mod 2^16`, as a signed 16-bit value.
pub const QINV: i16 = -3327;
/// `2^32 mod q`; `fqmul(x, MONT_SQ) = x * 2^16 mod q`.
pub const MONT_SQ: i16 = 1353;
/// `2^16 / 128 mod q`; `fqmul(x, INTT_SCALE) = x / 128 mod q`.
pub const INTT_SCALE: i16 = 512;
/// Barrett constant `round(2^26 / q)`.
pub const BARRETT_V: i16 = 20159;

const ROOT: i64 = 17;

/// A twiddle factor stored with its premultiplied Montgomery companion:
/// `lo = zeta * q^-1 mod 2^16`, `hi = zeta`. Multiplying by `hi` and
/// reducing with `lo` saves the separate `* q^-1` step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Twiddle {
    pub lo: i16,
    pub hi: i16,
}

impl Twiddle {
    pub const fn new(zeta: i16) -> Self {
        Twiddle {
            lo: zeta.wrapping_mul(QINV),
            hi: zeta,
        }
    }
}

/// Forward and inverse twiddles, each in the order its transform consumes them.
#[derive(Debug, Clone)]
pub struct TwiddleTable {
    pub forward: [Twiddle; 128],
    pub inverse: [Twiddle; 128],
}

const fn pow_mod(base: i64, mut e: u32) -> i64 {
    let q = Q as i64;
    let mut acc = 1i64;
    let mut b = base % q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    acc
}

pub const fn bitrev7(i: usize) -> usize {
    let mut r = 0;
    let mut k = 0;
    while k < 7 {
        r |= ((i >> k) & 1) << (6 - k);
        k += 1;
    }
    r
}

/// Centered representative in `[-(q-1)/2, (q-1)/2]`.
const fn centered(x: i64) -> i16 {
    let q = Q as i64;
    let mut r = x.rem_euclid(q);
    if r > (q - 1) / 2 {
        r -= q;
    }
    r as i16
}

/// `zeta^brv7(i) * 2^16 mod± q`.
pub const ZETAS: [i16; 128] = {
    let mut t = [0i16; 128];
    let mut i = 0;
    while i < 128 {
        let z = pow_mod(ROOT, bitrev7(i) as u32);
        t[i] = centered(z * 65536);
        i += 1;
    }
    t
};

pub const TWIDDLES: TwiddleTable = {
    let mut forward = [Twiddle { lo: 0, hi: 0 }; 128];
    let mut inverse = [Twiddle { lo: 0, hi: 0 }; 128];
    let mut i = 0;
    while i < 128 {
        forward[i] = Twiddle::new(ZETAS[i]);
        // the inverse transform walks the same constants from the top down
        inverse[i] = Twiddle::new(ZETAS[127 - i]);
        i += 1;
    }
    TwiddleTable { forward, inverse }
};

/// Index into `TWIDDLES.forward` used by the Cooley-Tukey layer with
/// butterfly distance `len` for coefficient `i`.
pub const fn forward_index(len: usize, i: usize) -> usize {
    128 / len + i / (2 * len)
}

/// Index into `TWIDDLES.inverse` used by the Gentleman-Sande layer with
/// butterfly distance `len` for coefficient `i`.
pub const fn inverse_index(len: usize, i: usize) -> usize {
    127 - (256 / len - 1 - i / (2 * len))
}

/// Basemul constant for degree-1 residue `r` (0..128), Montgomery form.
pub const fn gamma(r: usize) -> i16 {
    let z = ZETAS[64 + r / 2];
    if r.is_multiple_of(2) {
        z
    } else {
        -z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modq(x: i64) -> i64 {
        x.rem_euclid(Q as i64)
    }

    #[test]
    fn known_constants() {
        assert_eq!((QINV as i32 * Q as i32) & 0xffff, 1);
        assert_eq!(MONT_SQ as i64, (1i64 << 32) % Q as i64);
        assert_eq!(modq(INTT_SCALE as i64 * 128), 65536 % Q as i64);
        assert_eq!(BARRETT_V as i64, ((1i64 << 26) + Q as i64 / 2) / Q as i64);
        assert_eq!(&ZETAS[..4], &[-1044, -758, -359, -1517]);
    }

    #[test]
    fn root_is_primitive_256th() {
        assert_eq!(pow_mod(ROOT, 128), Q as i64 - 1);
        assert_eq!(pow_mod(ROOT, 256), 1);
    }

    #[test]
    fn twiddle_pairs_recompute() {
        for t in TWIDDLES.forward.iter().chain(TWIDDLES.inverse.iter()) {
            // lo * q == hi (mod 2^16)
            assert_eq!(t.lo.wrapping_mul(Q), t.hi);
            assert!(t.hi.abs() <= (Q - 1) / 2);
        }
        for i in 0..128 {
            let expect = modq(pow_mod(ROOT, bitrev7(i) as u32) * 65536);
            assert_eq!(modq(TWIDDLES.forward[i].hi as i64), expect);
        }
        assert_ne!(TWIDDLES.forward, TWIDDLES.inverse);
    }

    #[test]
    fn inverse_index_walks_down() {
        assert_eq!(inverse_index(2, 0), 0);
        assert_eq!(inverse_index(2, 4), 1);
        assert_eq!(inverse_index(4, 0), 64);
        assert_eq!(inverse_index(128, 0), 126);
        assert_eq!(forward_index(128, 0), 1);
        assert_eq!(forward_index(2, 252), 127);
    }
}
