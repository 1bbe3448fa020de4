use core::arch::x86_64::*;

use super::{unroll24, unroll5, BATCH_WIDTH, PI_CHAIN, RHO_CHAIN, ROUND_CONSTANTS};

#[inline(always)]
unsafe fn xor5(a: __m512i, b: __m512i, c: __m512i, d: __m512i, e: __m512i) -> __m512i {
    let t = _mm512_ternarylogic_epi64::<0x96>(a, b, c);
    _mm512_ternarylogic_epi64::<0x96>(t, d, e)
}

#[inline(always)]
unsafe fn rol(x: __m512i, r: u32) -> __m512i {
    _mm512_rolv_epi64(x, _mm512_set1_epi64(r as i64))
}

/// Keccak-f[1600] on eight interleaved instances. Instances whose bit in
/// `mask` is clear keep their input state.
#[target_feature(enable = "avx512f")]
#[allow(unused_assignments)]
pub unsafe fn permute_x8(lanes: &mut [[u64; BATCH_WIDTH]; 25], mask: u8) {
    let mut a = [_mm512_setzero_si512(); 25];
    for w in 0..25 {
        a[w] = _mm512_loadu_si512(lanes[w].as_ptr() as *const _);
    }
    let orig = a;
    for rc in ROUND_CONSTANTS {
        let mut c = [_mm512_setzero_si512(); 5];
        unroll5!(x, {
            c[x] = xor5(a[x], a[x + 5], a[x + 10], a[x + 15], a[x + 20]);
        });
        unroll5!(x, {
            let d = _mm512_xor_si512(c[(x + 4) % 5], rol(c[(x + 1) % 5], 1));
            unroll5!(y, {
                a[x + 5 * y] = _mm512_xor_si512(a[x + 5 * y], d);
            });
        });
        let mut last = a[1];
        unroll24!(t, {
            let tmp = a[PI_CHAIN[t]];
            a[PI_CHAIN[t]] = rol(last, RHO_CHAIN[t]);
            last = tmp;
        });
        unroll5!(y, {
            let row = [a[5 * y], a[5 * y + 1], a[5 * y + 2], a[5 * y + 3], a[5 * y + 4]];
            unroll5!(x, {
                // row[x] ^ (!row[x + 1] & row[x + 2])
                a[5 * y + x] = _mm512_ternarylogic_epi64::<0xd2>(row[x], row[(x + 1) % 5], row[(x + 2) % 5]);
            });
        });
        a[0] = _mm512_xor_si512(a[0], _mm512_set1_epi64(rc as i64));
    }
    for w in 0..25 {
        let v = _mm512_mask_mov_epi64(orig[w], mask, a[w]);
        _mm512_storeu_si512(lanes[w].as_mut_ptr() as *mut _, v);
    }
}
