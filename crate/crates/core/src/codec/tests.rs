use super::*;
use crate::params::ParameterSetName;
use crate::testdata::Trace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const WIDTHS: [usize; 5] = [1, 4, 5, 10, 11];

/// `round(2^d x / q) mod 2^d` through quotient and remainder.
fn compress_oracle(x: u32, d: usize) -> u32 {
    let num = (1u64 << d) * x as u64;
    let (quo, rem) = (num / 3329, num % 3329);
    let r = if 2 * rem >= 3329 { quo + 1 } else { quo };
    (r % (1 << d)) as u32
}

fn decompress_oracle(y: u32, d: usize) -> u32 {
    let num = 3329u64 * y as u64;
    let den = 1u64 << d;
    let (quo, rem) = (num / den, num % den);
    (if 2 * rem >= den { quo + 1 } else { quo }) as u32
}

fn centered_distance(a: u32, b: u32) -> u32 {
    let diff = (a as i64 - b as i64).rem_euclid(3329) as u32;
    diff.min(3329 - diff)
}

fn encode_oracle(f: &[i16; 256], d: usize) -> Vec<u8> {
    let mut bits = Vec::new();
    for &c in f {
        for j in 0..d {
            bits.push((c as u32 >> j) & 1);
        }
    }
    bits.chunks(8).map(|b| b.iter().enumerate().map(|(i, &v)| (v << i) as u8).sum()).collect()
}

#[test]
fn compress_small_cases() {
    for d in WIDTHS {
        assert_eq!(compress(0, d), 0);
        assert_eq!(decompress(0, d), 0);
        assert!(decompress(((1u32 << d) - 1) as u16, d) < 3329);
    }
    assert_eq!(compress(1665, 1), 1);
    assert_eq!(compress(832, 1), 0);
    assert_eq!(compress(833, 1), 1);
    assert_eq!(compress(2496, 1), 1);
    assert_eq!(compress(2497, 1), 0);
}

#[test]
fn compress_exhaustive() {
    for d in WIDTHS {
        let bound = decompress_oracle(1, d + 1);
        for x in 0..3329u32 {
            let y = compress(x as u16, d) as u32;
            assert_eq!(y, compress_oracle(x, d), "x = {x}, d = {d}");
            let back = decompress(y as u16, d) as u32;
            assert!(centered_distance(back, x) <= bound, "x = {x}, d = {d}");
        }
        for y in 0..(1u32 << d) {
            let x = decompress(y as u16, d) as u32;
            assert_eq!(x, decompress_oracle(y, d));
            assert_eq!(compress(x as u16, d) as u32, y, "y = {y}, d = {d}");
        }
    }
}

#[test]
fn encode_layout() {
    let mut f = [0i16; 256];
    assert!(byte_encode(&f, 12).unwrap().iter().all(|&b| b == 0));
    f[0] = 1;
    let b = byte_encode(&f, 12).unwrap();
    assert_eq!(&b[..3], &[1, 0, 0]);
    f[1] = 0xabc;
    let b = byte_encode(&f, 12).unwrap();
    assert_eq!(&b[..3], &[0x01, 0xc0, 0xab]);
    f[0] = 4096;
    assert!(matches!(byte_encode(&f, 12), Err(Error::InvalidArgument(_))));
    f[0] = -1;
    assert!(byte_encode(&f, 12).is_err());
    assert!(byte_encode(&[0; 256], 0).is_err());
}

#[test]
fn encode_decode_round_trip() {
    let mut rng = ChaCha20Rng::seed_from_u64(20);
    for d in 1..=12usize {
        for _ in 0..200 {
            let hi = if d == 12 { 3329 } else { 1 << d };
            let f: [i16; 256] = core::array::from_fn(|_| rng.gen_range(0..hi) as i16);
            let b = byte_encode(&f, d).unwrap();
            assert_eq!(b.len(), 32 * d);
            assert_eq!(b, encode_oracle(&f, d));
            assert_eq!(byte_decode(&b, d).unwrap().coeffs, f);
        }
        assert!(byte_decode(&vec![0; 32 * d - 1], d).is_err());
    }
}

#[test]
fn twelve_bit_decode_reduces() {
    let f = [4095i16; 256];
    let b = encode_oracle(&f, 12);
    assert!(byte_decode(&b, 12).unwrap().coeffs.iter().all(|&c| c == 4095 - 3329));
    let f = [3329i16; 256];
    assert!(byte_decode(&encode_oracle(&f, 12), 12).unwrap().coeffs.iter().all(|&c| c == 0));
}

#[test]
fn ciphertext_halves_match_trace() {
    for name in ParameterSetName::ALL {
        let set = ParameterSet::from(name);
        let trace = Trace::load(name);
        let u0 = Poly::from_coeffs(trace.coeffs("u[0]"));
        assert_eq!(compress_poly(&u0, set.du).coeffs, trace.coeffs("compress(u[0])"));
        let v = Poly::from_coeffs(trace.coeffs("v"));
        assert_eq!(compress_poly(&v, set.dv).coeffs, trace.coeffs("compress(v)"));
        let c2 = byte_encode(&compress_poly(&v, set.dv).coeffs, set.dv).unwrap();
        assert_eq!(c2, trace.bytes("c2"));
        let c = trace.bytes("c");
        assert_eq!(c.len(), set.ct_len());
        let (u, v2) = deserialize_ct(&set, &c).unwrap();
        assert_eq!(u.len(), set.k);
        assert_eq!(serialize_ct(&set, &u, &v2), c);
    }
}

#[test]
fn key_layouts_round_trip() {
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    for set in ParameterSet::ALL {
        let t: Vec<NttPoly> = (0..set.k)
            .map(|_| NttPoly::from_bit_reversed(core::array::from_fn(|_| rng.gen_range(0..3329))))
            .collect();
        let rho: [u8; 32] = rng.gen();
        let ek = serialize_ek(&t, &rho);
        assert_eq!(ek.len(), set.ek_len());
        assert_eq!(deserialize_ek(&set, &ek).unwrap(), (t.clone(), rho));
        let dk_pke = serialize_dk_pke(&t);
        assert_eq!(deserialize_dk_pke(&set, &dk_pke).unwrap(), t);
        let h: [u8; 32] = rng.gen();
        let z: [u8; 32] = rng.gen();
        for (wh, wz) in [(true, true), (false, false), (false, true)] {
            let dk = serialize_dk(&dk_pke, &ek, wh.then_some(&h), wz.then_some(&z));
            assert_eq!(dk.len(), dk_len(&set, wh, wz));
            let parts = deserialize_dk(&set, &dk, wh, wz).unwrap();
            assert_eq!(parts.dk_pke, &dk_pke[..]);
            assert_eq!(parts.ek, &ek[..]);
            assert_eq!(parts.h_ek, wh.then_some(h));
            assert_eq!(parts.z, wz.then_some(z));
        }
        assert_eq!(dk_len(&set, true, true), 768 * set.k + 96);
        let tagged = serialize_ct_tagged(&vec![5; set.ct_len()], &h);
        assert_eq!(split_ct_tagged(&set, &tagged).unwrap().1, h);
    }
    assert_eq!(crate::params::ML_KEM_512.ct_len() + 32, 800);
}

#[test]
fn wrong_lengths_name_the_role() {
    let set = crate::params::ML_KEM_768;
    let cases: Vec<(Error, &str)> = vec![
        (deserialize_ek(&set, &[0; 10]).unwrap_err(), "ek"),
        (deserialize_dk_pke(&set, &[0; 10]).unwrap_err(), "dk_pke"),
        (deserialize_dk(&set, &[0; 10], true, true).unwrap_err(), "dk"),
        (deserialize_ct(&set, &vec![0; set.ct_len() + 1]).unwrap_err(), "ct"),
        (split_ct_tagged(&set, &vec![0; set.ct_len()]).unwrap_err(), "ct_tagged"),
    ];
    for (err, role) in cases {
        match err {
            Error::MalformedInput { role: r, .. } => assert_eq!(r, role),
            other => panic!("{other:?}"),
        }
    }
    assert!(WireBytes::new(Role::Ek, vec![0; 3], 4).is_err());
    assert_eq!(WireBytes::new(Role::Ek, vec![0; 4], 4).unwrap().payload.len(), 4);
}
