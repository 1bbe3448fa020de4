use super::{keccak_p1600, xor_bytes_with, KeccakState, Variant};
use crate::error::{Error, Result};
use crate::polyring::Backend;

pub const BATCH_WIDTH: usize = 8;

/// Eight Keccak states stored lane-interleaved: `lanes[w][i]` is word `w`
/// of instance `i`, so one 512-bit register holds one word of every
/// instance.
#[derive(Clone)]
pub struct BatchKeccakState {
    lanes: [[u64; BATCH_WIDTH]; 25],
    variant: Variant,
    active: usize,
    squeezed: usize,
    backend: Backend,
}

fn permute_portable(lanes: &mut [[u64; BATCH_WIDTH]; 25], mask: u8) {
    for i in 0..BATCH_WIDTH {
        if mask & (1 << i) == 0 {
            continue;
        }
        let mut st = [0u64; 25];
        for w in 0..25 {
            st[w] = lanes[w][i];
        }
        keccak_p1600(&mut st);
        for w in 0..25 {
            lanes[w][i] = st[w];
        }
    }
}

fn permute_masked(backend: Backend, lanes: &mut [[u64; BATCH_WIDTH]; 25], mask: u8) {
    if mask == 0 {
        return;
    }
    #[cfg(target_arch = "x86_64")]
    if backend.is_vector() {
        // SAFETY: a vector backend is only constructed after feature detection.
        unsafe { super::avx512::permute_x8(lanes, mask) };
        return;
    }
    let _ = backend;
    permute_portable(lanes, mask);
}

fn xor_into(lanes: &mut [[u64; BATCH_WIDTH]; 25], inst: usize, offset: usize, bytes: &[u8]) {
    xor_bytes_with(|w, v| lanes[w][inst] ^= v, offset, bytes);
}

impl BatchKeccakState {
    /// Absorbs up to eight messages of arbitrary lengths, one per instance,
    /// and pads each. Instances past `msgs.len()` stay idle.
    pub fn absorb(backend: Backend, variant: Variant, msgs: &[&[u8]]) -> Result<Self> {
        if msgs.is_empty() || msgs.len() > BATCH_WIDTH {
            return Err(Error::InvalidParameter(format!(
                "batch holds 1 to {BATCH_WIDTH} messages, got {}",
                msgs.len()
            )));
        }
        let rate = variant.rate();
        let mut lanes = [[0u64; BATCH_WIDTH]; 25];
        let blocks: Vec<usize> = msgs.iter().map(|m| m.len() / rate + 1).collect();
        let max_blocks = blocks.iter().copied().max().unwrap_or(0);
        for b in 0..max_blocks {
            let mut mask = 0u8;
            for (i, m) in msgs.iter().enumerate() {
                if b >= blocks[i] {
                    continue;
                }
                mask |= 1 << i;
                let start = b * rate;
                if b + 1 < blocks[i] {
                    xor_into(&mut lanes, i, 0, &m[start..start + rate]);
                } else {
                    let tail = &m[start..];
                    xor_into(&mut lanes, i, 0, tail);
                    xor_into(&mut lanes, i, tail.len(), &[variant.domain()]);
                    xor_into(&mut lanes, i, rate - 1, &[0x80]);
                }
            }
            permute_masked(backend, &mut lanes, mask);
        }
        Ok(BatchKeccakState {
            lanes,
            variant,
            active: msgs.len(),
            squeezed: 0,
            backend,
        })
    }

    pub fn active(&self) -> usize {
        self.active
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    fn active_mask(&self) -> u8 {
        ((1u16 << self.active) - 1) as u8
    }

    /// Squeezes the next full rate-sized block of every active instance and
    /// appends it to the matching output buffer.
    pub fn squeeze_block(&mut self, out: &mut [Vec<u8>]) {
        debug_assert!(out.len() >= self.active);
        if self.squeezed > 0 {
            let mask = self.active_mask();
            permute_masked(self.backend, &mut self.lanes, mask);
        }
        self.squeezed += 1;
        let rate = self.variant.rate();
        for (i, o) in out.iter_mut().enumerate().take(self.active) {
            o.reserve(rate);
            for w in 0..rate / 8 {
                o.extend_from_slice(&self.lanes[w][i].to_le_bytes());
            }
        }
    }

    /// Instance `i` as a scalar sponge positioned where the batch stands.
    pub fn lane_state(&self, i: usize) -> [u64; 25] {
        let mut st = [0u64; 25];
        for w in 0..25 {
            st[w] = self.lanes[w][i];
        }
        st
    }
}

fn run_batch(backend: Backend, variant: Variant, msgs: &[&[u8]], outlen: usize) -> Result<Vec<Vec<u8>>> {
    let mut st = BatchKeccakState::absorb(backend, variant, msgs)?;
    let mut out: Vec<Vec<u8>> = (0..msgs.len()).map(|_| Vec::with_capacity(outlen + variant.rate())).collect();
    while out[0].len() < outlen {
        st.squeeze_block(&mut out);
    }
    for o in &mut out {
        o.truncate(outlen);
    }
    Ok(out)
}

fn check_outlen(variant: Variant, outlen: usize) -> Result<()> {
    match variant.digest_len() {
        Some(d) if d != outlen => Err(Error::InvalidParameter(format!(
            "{variant:?} produces {d} bytes, asked for {outlen}"
        ))),
        _ => Ok(()),
    }
}

/// Hashes exactly 1 or 8 messages. Lane `i` of the result equals the scalar
/// output for `msgs[i]`.
pub fn batch_absorb_squeeze(
    backend: Backend,
    variant: Variant,
    msgs: &[&[u8]],
    outlen: usize,
) -> Result<Vec<Vec<u8>>> {
    check_outlen(variant, outlen)?;
    match msgs.len() {
        1 => {
            let mut st = KeccakState::new(variant);
            st.absorb(msgs[0]);
            let mut out = vec![0u8; outlen];
            st.squeeze(&mut out);
            Ok(vec![out])
        }
        BATCH_WIDTH => run_batch(backend, variant, msgs, outlen),
        n => Err(Error::InvalidParameter(format!(
            "batch width must be 1 or {BATCH_WIDTH}, got {n}"
        ))),
    }
}

/// Hashes any number of messages, eight at a time. A lone leftover job runs
/// on the scalar sponge; two or more share one batch with idle lanes masked.
pub fn hash_many(
    backend: Backend,
    variant: Variant,
    msgs: &[&[u8]],
    outlen: usize,
) -> Result<Vec<Vec<u8>>> {
    check_outlen(variant, outlen)?;
    let mut out = Vec::with_capacity(msgs.len());
    for chunk in msgs.chunks(BATCH_WIDTH) {
        if chunk.len() == 1 {
            out.extend(batch_absorb_squeeze(backend, variant, chunk, outlen)?);
        } else {
            out.extend(run_batch(backend, variant, chunk, outlen)?);
        }
    }
    Ok(out)
}
