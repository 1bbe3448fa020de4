//! 32-lane backend on AVX-512BW: one polynomial fills eight `zmm` registers
//! and all seven layers run without touching memory in between.
//!
//! Callers must check `is_x86_feature_detected!("avx512bw")` first; the
//! `Backend` type only hands out a vector backend after that check.

use core::arch::x86_64::*;

use super::layout::{
    LaneTwiddles, BASEMUL_GAMMA, FORWARD_LANE_TWIDDLES, FORWARD_REG_TWIDDLES,
    INVERSE_LANE_TWIDDLES, INVERSE_REDUCE_MASKS, INVERSE_REG_TWIDDLES, SHUFFLES,
};
use super::tables::{Twiddle, BARRETT_V, INTT_SCALE, MONT_SQ, QINV};
use crate::params::{N, Q};

type Regs = [__m512i; 8];

#[inline(always)]
unsafe fn load(c: &[i16; N]) -> Regs {
    let p = c.as_ptr() as *const __m512i;
    core::array::from_fn(|r| _mm512_loadu_si512(p.add(r)))
}

#[inline(always)]
unsafe fn store(c: &mut [i16; N], v: &Regs) {
    let p = c.as_mut_ptr() as *mut __m512i;
    for (r, x) in v.iter().enumerate() {
        _mm512_storeu_si512(p.add(r), *x);
    }
}

#[inline(always)]
unsafe fn lanes(a: &[i16; 32]) -> __m512i {
    _mm512_loadu_si512(a.as_ptr() as *const __m512i)
}

/// Signed Barrett reduction: `a - q * (hi16(a * v) >> 10)`.
#[inline(always)]
unsafe fn red16(a: __m512i) -> __m512i {
    let t = _mm512_mulhi_epi16(a, _mm512_set1_epi16(BARRETT_V));
    let t = _mm512_srai_epi16::<10>(t);
    let t = _mm512_mullo_epi16(t, _mm512_set1_epi16(Q));
    _mm512_sub_epi16(a, t)
}

/// Montgomery product with a premultiplied twiddle pair.
#[inline(always)]
unsafe fn mul_twiddle(x: __m512i, zl: __m512i, zh: __m512i) -> __m512i {
    let t = _mm512_mullo_epi16(x, zl);
    let h = _mm512_mulhi_epi16(x, zh);
    let t = _mm512_mulhi_epi16(t, _mm512_set1_epi16(Q));
    _mm512_sub_epi16(h, t)
}

/// Montgomery product of two variable operands.
#[inline(always)]
unsafe fn fqmul(a: __m512i, b: __m512i) -> __m512i {
    let lo = _mm512_mullo_epi16(a, b);
    let t = _mm512_mullo_epi16(lo, _mm512_set1_epi16(QINV));
    let h = _mm512_mulhi_epi16(a, b);
    _mm512_sub_epi16(h, _mm512_mulhi_epi16(t, _mm512_set1_epi16(Q)))
}

#[inline(always)]
unsafe fn broadcast(t: Twiddle) -> (__m512i, __m512i) {
    (_mm512_set1_epi16(t.lo), _mm512_set1_epi16(t.hi))
}

#[inline(always)]
unsafe fn ct(v: &mut Regs, u: usize, w: usize, zl: __m512i, zh: __m512i) {
    let t = mul_twiddle(v[w], zl, zh);
    v[w] = _mm512_sub_epi16(v[u], t);
    v[u] = _mm512_add_epi16(v[u], t);
}

#[inline(always)]
unsafe fn gs(v: &mut Regs, u: usize, w: usize, zl: __m512i, zh: __m512i) {
    let diff = _mm512_sub_epi16(v[w], v[u]);
    v[u] = _mm512_add_epi16(v[u], v[w]);
    v[w] = mul_twiddle(diff, zl, zh);
}

/// `ShuffleK` on every register pair; `which` indexes `SHUFFLE_SIZES`.
#[inline(always)]
unsafe fn shuffle(v: &mut Regs, which: usize) {
    let (fi, si) = &SHUFFLES[which];
    let fi = lanes(fi);
    let si = lanes(si);
    for p in 0..4 {
        let a = v[2 * p];
        let b = v[2 * p + 1];
        v[2 * p] = _mm512_permutex2var_epi16(a, fi, b);
        v[2 * p + 1] = _mm512_permutex2var_epi16(a, si, b);
    }
}

#[inline(always)]
unsafe fn lane_layer_ct(v: &mut Regs, tw: &[LaneTwiddles; 4]) {
    for (p, t) in tw.iter().enumerate() {
        ct(v, 2 * p, 2 * p + 1, lanes(&t.lo), lanes(&t.hi));
    }
}

#[inline(always)]
unsafe fn lane_layer_gs(v: &mut Regs, tw: &[LaneTwiddles; 4]) {
    for (p, t) in tw.iter().enumerate() {
        gs(v, 2 * p, 2 * p + 1, lanes(&t.lo), lanes(&t.hi));
    }
}

#[inline(always)]
unsafe fn masked_reduce(v: &mut Regs, masks: &[u32; 8]) {
    for (x, &m) in v.iter_mut().zip(masks) {
        if m != 0 {
            *x = _mm512_mask_mov_epi16(*x, m, red16(*x));
        }
    }
}

/// Forward transform; output is in storage (lane) order.
#[target_feature(enable = "avx512f,avx512bw")]
pub unsafe fn ntt(c: &mut [i16; N]) {
    let mut v = load(c);
    for (s, dist) in [4usize, 2, 1].into_iter().enumerate() {
        for u in 0..8 {
            if u & dist == 0 {
                let (zl, zh) = broadcast(FORWARD_REG_TWIDDLES[s][u]);
                ct(&mut v, u, u + dist, zl, zh);
            }
        }
    }
    for s in 0..4 {
        shuffle(&mut v, s);
        lane_layer_ct(&mut v, &FORWARD_LANE_TWIDDLES[s]);
    }
    shuffle(&mut v, 4);
    store(c, &v);
}

/// Inverse transform from storage order back to coefficient order.
#[target_feature(enable = "avx512f,avx512bw")]
pub unsafe fn intt(c: &mut [i16; N]) {
    let mut v = load(c);
    for x in v.iter_mut() {
        *x = red16(*x);
    }
    shuffle(&mut v, 4);
    for s in 0..4 {
        lane_layer_gs(&mut v, &INVERSE_LANE_TWIDDLES[s]);
        // layers 3 and 4 are s = 2, 3
        if s >= 2 {
            masked_reduce(&mut v, &INVERSE_REDUCE_MASKS[s - 2]);
        }
        shuffle(&mut v, 3 - s);
    }
    for (s, dist) in [1usize, 2, 4].into_iter().enumerate() {
        for u in 0..8 {
            if u & dist == 0 {
                let (zl, zh) = broadcast(INVERSE_REG_TWIDDLES[s][u]);
                gs(&mut v, u, u + dist, zl, zh);
            }
        }
        if s < 2 {
            masked_reduce(&mut v, &INVERSE_REDUCE_MASKS[s + 2]);
        }
    }
    let f = _mm512_set1_epi16(INTT_SCALE);
    for x in v.iter_mut() {
        *x = fqmul(*x, f);
    }
    store(c, &v);
}

/// Residue-wise product in storage order, plain domain out.
#[target_feature(enable = "avx512f,avx512bw")]
pub unsafe fn basemul(out: &mut [i16; N], a: &[i16; N], b: &[i16; N]) {
    let va = load(a);
    let vb = load(b);
    let mut o = va;
    let msq = _mm512_set1_epi16(MONT_SQ);
    for p in 0..4 {
        let (a0, a1) = (va[2 * p], va[2 * p + 1]);
        let (b0, b1) = (vb[2 * p], vb[2 * p + 1]);
        let g = lanes(&BASEMUL_GAMMA[p]);
        let r0 = _mm512_add_epi16(fqmul(fqmul(a1, b1), g), fqmul(a0, b0));
        let r1 = _mm512_add_epi16(fqmul(a0, b1), fqmul(a1, b0));
        o[2 * p] = fqmul(r0, msq);
        o[2 * p + 1] = fqmul(r1, msq);
    }
    store(out, &o);
}

#[target_feature(enable = "avx512f,avx512bw")]
pub unsafe fn add(out: &mut [i16; N], a: &[i16; N], b: &[i16; N]) {
    let (va, vb) = (load(a), load(b));
    let o: Regs = core::array::from_fn(|r| _mm512_add_epi16(va[r], vb[r]));
    store(out, &o);
}

#[target_feature(enable = "avx512f,avx512bw")]
pub unsafe fn sub(out: &mut [i16; N], a: &[i16; N], b: &[i16; N]) {
    let (va, vb) = (load(a), load(b));
    let o: Regs = core::array::from_fn(|r| _mm512_sub_epi16(va[r], vb[r]));
    store(out, &o);
}

#[target_feature(enable = "avx512f,avx512bw")]
pub unsafe fn reduce(c: &mut [i16; N]) {
    let mut v = load(c);
    for x in v.iter_mut() {
        *x = red16(*x);
    }
    store(c, &v);
}

#[target_feature(enable = "avx512f,avx512bw")]
pub unsafe fn to_mont(c: &mut [i16; N]) {
    let mut v = load(c);
    let f = _mm512_set1_epi16(MONT_SQ);
    for x in v.iter_mut() {
        *x = fqmul(*x, f);
    }
    store(c, &v);
}

#[target_feature(enable = "avx512f,avx512bw")]
pub unsafe fn from_mont(c: &mut [i16; N]) {
    let mut v = load(c);
    let one = _mm512_set1_epi16(1);
    for x in v.iter_mut() {
        *x = fqmul(*x, one);
    }
    store(c, &v);
}
