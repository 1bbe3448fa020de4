//! Coefficient placement for the 32-lane backend.
//!
//! A polynomial occupies eight 32-lane registers. The first three forward
//! layers pair whole registers. From the fourth layer on, partners share a
//! register, so each register pair `(2p, 2p + 1)` is passed through
//! `Shuffle16`, `Shuffle8`, `Shuffle4` and `Shuffle2` before the matching
//! layer. A final `Shuffle1` splits every degree-1 residue so its constant
//! term sits in register `2p` and its linear term in the same lane of
//! register `2p + 1`. That final arrangement is the storage order of a
//! lane-layout `NttPoly`. Every shuffle is an involution, so the inverse
//! transform applies the same network in reverse.
//!
//! Every table here is derived at compile time by tracking which logical
//! coefficient (scalar bit-reversed order) sits in each lane.

use super::scalar::lazy_reduce;
use super::tables::{forward_index, gamma, inverse_index, Twiddle, TWIDDLES};

pub const LANES: usize = 32;
pub const REGS: usize = 8;

pub type Placement = [[u8; LANES]; REGS];

const fn natural() -> Placement {
    let mut m = [[0u8; LANES]; REGS];
    let mut r = 0;
    while r < REGS {
        let mut l = 0;
        while l < LANES {
            m[r][l] = (r * LANES + l) as u8;
            l += 1;
        }
        r += 1;
    }
    m
}

/// Source lane (0..64, `>= 32` meaning the second register) for each lane
/// of the first and second outputs of `ShuffleK`.
pub const fn shuffle_index(k: usize) -> ([i16; LANES], [i16; LANES]) {
    let mut first = [0i16; LANES];
    let mut second = [0i16; LANES];
    let mut l = 0;
    while l < LANES {
        if (l / k).is_multiple_of(2) {
            first[l] = l as i16;
            second[l] = (l + k) as i16;
        } else {
            first[l] = (LANES + l - k) as i16;
            second[l] = (LANES + l) as i16;
        }
        l += 1;
    }
    (first, second)
}

const fn shuffle(m: Placement, k: usize) -> Placement {
    let (fi, si) = shuffle_index(k);
    let mut out = m;
    let mut p = 0;
    while p < REGS / 2 {
        let mut l = 0;
        while l < LANES {
            let a = fi[l] as usize;
            let b = si[l] as usize;
            out[2 * p][l] = if a < LANES { m[2 * p][a] } else { m[2 * p + 1][a - LANES] };
            out[2 * p + 1][l] = if b < LANES { m[2 * p][b] } else { m[2 * p + 1][b - LANES] };
            l += 1;
        }
        p += 1;
    }
    out
}

/// Placement during forward layers 4..=7 (index 0..4), then storage order.
pub const STAGES: [Placement; 5] = {
    let s4 = shuffle(natural(), 16);
    let s5 = shuffle(s4, 8);
    let s6 = shuffle(s5, 4);
    let s7 = shuffle(s6, 2);
    [s4, s5, s6, s7, shuffle(s7, 1)]
};

pub const STORAGE: Placement = STAGES[4];

pub const SHUFFLE_SIZES: [usize; 5] = [16, 8, 4, 2, 1];

/// Permutation indices for each shuffle size, in `SHUFFLE_SIZES` order.
pub const SHUFFLES: [([i16; LANES], [i16; LANES]); 5] = {
    let mut t = [([0i16; LANES], [0i16; LANES]); 5];
    let mut s = 0;
    while s < 5 {
        t[s] = shuffle_index(SHUFFLE_SIZES[s]);
        s += 1;
    }
    t
};

#[derive(Clone, Copy)]
pub struct LaneTwiddles {
    pub lo: [i16; LANES],
    pub hi: [i16; LANES],
}

const fn lane_twiddles(m: &Placement, pair: usize, len: usize, inverse: bool) -> LaneTwiddles {
    let mut lo = [0i16; LANES];
    let mut hi = [0i16; LANES];
    let mut l = 0;
    while l < LANES {
        let i = m[2 * pair][l] as usize;
        let t: Twiddle = if inverse {
            TWIDDLES.inverse[inverse_index(len, i)]
        } else {
            TWIDDLES.forward[forward_index(len, i)]
        };
        lo[l] = t.lo;
        hi[l] = t.hi;
        l += 1;
    }
    LaneTwiddles { lo, hi }
}

/// Per-lane twiddles for the in-register layers. `[layer][pair]`, where
/// layer 0..4 is butterfly distance 16, 8, 4, 2.
pub const FORWARD_LANE_TWIDDLES: [[LaneTwiddles; 4]; 4] = {
    let mut t = [[LaneTwiddles { lo: [0; LANES], hi: [0; LANES] }; 4]; 4];
    let mut s = 0;
    while s < 4 {
        let mut p = 0;
        while p < 4 {
            t[s][p] = lane_twiddles(&STAGES[s], p, 16 >> s, false);
            p += 1;
        }
        s += 1;
    }
    t
};

/// Same for the inverse transform: `[layer][pair]` with layer 0..4 being
/// butterfly distance 2, 4, 8, 16.
pub const INVERSE_LANE_TWIDDLES: [[LaneTwiddles; 4]; 4] = {
    let mut t = [[LaneTwiddles { lo: [0; LANES], hi: [0; LANES] }; 4]; 4];
    let mut s = 0;
    while s < 4 {
        let mut p = 0;
        while p < 4 {
            t[s][p] = lane_twiddles(&STAGES[3 - s], p, 2 << s, true);
            p += 1;
        }
        s += 1;
    }
    t
};

/// Register-wide twiddles for the first three forward layers:
/// `[layer][upper register]` with distance 128, 64, 32.
pub const FORWARD_REG_TWIDDLES: [[Twiddle; REGS]; 3] = {
    let mut t = [[Twiddle { lo: 0, hi: 0 }; REGS]; 3];
    let mut s = 0;
    while s < 3 {
        let len = 128 >> s;
        let mut r = 0;
        while r < REGS {
            t[s][r] = TWIDDLES.forward[forward_index(len, r * LANES)];
            r += 1;
        }
        s += 1;
    }
    t
};

/// Register-wide twiddles for the last three inverse layers:
/// `[layer][upper register]` with distance 32, 64, 128.
pub const INVERSE_REG_TWIDDLES: [[Twiddle; REGS]; 3] = {
    let mut t = [[Twiddle { lo: 0, hi: 0 }; REGS]; 3];
    let mut s = 0;
    while s < 3 {
        let len = 32 << s;
        let mut r = 0;
        while r < REGS {
            t[s][r] = TWIDDLES.inverse[inverse_index(len, r * LANES)];
            r += 1;
        }
        s += 1;
    }
    t
};

/// Lane masks for the lazy reductions after inverse layers 3, 4, 5, 6.
pub const INVERSE_REDUCE_MASKS: [[u32; REGS]; 4] = {
    // placement in force after each of those layers
    let places = [STAGES[1], STAGES[0], natural(), natural()];
    let mut masks = [[0u32; REGS]; 4];
    let mut s = 0;
    while s < 4 {
        let mut r = 0;
        while r < REGS {
            let mut l = 0;
            while l < LANES {
                if lazy_reduce(s + 3, places[s][r][l] as usize) {
                    masks[s][r] |= 1 << l;
                }
                l += 1;
            }
            r += 1;
        }
        s += 1;
    }
    masks
};

/// Basemul constants per lane for each register pair of storage order.
pub const BASEMUL_GAMMA: [[i16; LANES]; 4] = {
    let mut g = [[0i16; LANES]; 4];
    let mut p = 0;
    while p < 4 {
        let mut l = 0;
        while l < LANES {
            g[p][l] = gamma(STORAGE[2 * p][l] as usize / 2);
            l += 1;
        }
        p += 1;
    }
    g
};

/// Position in storage order of each scalar-order coefficient.
pub const SCALAR_TO_STORAGE: [u8; 256] = {
    let mut t = [0u8; 256];
    let mut r = 0;
    while r < REGS {
        let mut l = 0;
        while l < LANES {
            t[STORAGE[r][l] as usize] = (r * LANES + l) as u8;
            l += 1;
        }
        r += 1;
    }
    t
};

pub fn to_storage(scalar: &[i16; 256]) -> [i16; 256] {
    let mut out = [0i16; 256];
    for (i, &pos) in SCALAR_TO_STORAGE.iter().enumerate() {
        out[pos as usize] = scalar[i];
    }
    out
}

pub fn to_scalar(storage: &[i16; 256]) -> [i16; 256] {
    let mut out = [0i16; 256];
    for (i, &pos) in SCALAR_TO_STORAGE.iter().enumerate() {
        out[i] = storage[pos as usize];
    }
    out
}
