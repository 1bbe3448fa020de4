use core::arch::x86_64::*;

use crate::params::{N, Q};

/// Byte offset of the 16-bit window holding candidate `t` of a 24-byte group.
const OFFSETS: [i32; 16] = {
    let mut o = [0i32; 16];
    let mut t = 0;
    while t < 16 {
        o[t] = (3 * (t / 2) + (t & 1)) as i32;
        t += 1;
    }
    o
};

const SHIFTS: [u32; 16] = {
    let mut s = [0u32; 16];
    let mut t = 0;
    while t < 16 {
        s[t] = 4 * (t as u32 & 1);
        t += 1;
    }
    s
};

/// Rejection parsing with masked compress stores: 16 candidates per step
/// from each 24-byte group.
#[target_feature(enable = "avx512f")]
pub unsafe fn parse_uniform(bytes: &[u8], out: &mut [i16; N], ctr: &mut usize) {
    debug_assert_eq!(bytes.len() % 24, 0);
    let offsets = _mm512_loadu_si512(OFFSETS.as_ptr() as *const _);
    let shifts = _mm512_loadu_si512(SHIFTS.as_ptr() as *const _);
    let low12 = _mm512_set1_epi32(0xfff);
    let bound = _mm512_set1_epi32(Q as i32);
    let mut padded = [0u8; 28];
    let mut kept = [0i32; 16];
    for group in bytes.chunks_exact(24) {
        if *ctr >= N {
            return;
        }
        padded[..24].copy_from_slice(group);
        let words = _mm512_i32gather_epi32::<1>(offsets, padded.as_ptr() as *const _);
        let cand = _mm512_and_si512(_mm512_srlv_epi32(words, shifts), low12);
        let accept = _mm512_cmplt_epi32_mask(cand, bound);
        _mm512_mask_compressstoreu_epi32(kept.as_mut_ptr() as *mut _, accept, cand);
        let n = (accept.count_ones() as usize).min(N - *ctr);
        for (dst, &v) in out[*ctr..*ctr + n].iter_mut().zip(&kept[..n]) {
            *dst = v as i16;
        }
        *ctr += n;
    }
}
