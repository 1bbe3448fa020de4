use super::*;
use crate::params::ParameterSetName;
use crate::testdata::Trace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn backends() -> Vec<Backend> {
    let mut v = vec![Backend::scalar()];
    if let Ok(b) = Backend::vector() {
        v.push(b);
    }
    v
}

#[test]
fn keygen_and_encrypt_match_trace() {
    for name in ParameterSetName::ALL {
        let set = ParameterSet::from(name);
        let trace = Trace::load(name);
        for backend in backends() {
            // The trace expands d without the rank byte; start from its seeds.
            let kp = keygen_from_seeds(backend, &set, &trace.seed("ρ"), &trace.seed("σ"));
            assert_eq!(kp.ek, trace.bytes("ek"), "{name} {}", backend.name());
            assert_eq!(&kp.dk[..], &trace.bytes("dkPKE")[..], "{name}");
            let m = trace.seed("m");
            let r = trace.all("r")[0];
            let r: [u8; 32] = hex::decode(r).unwrap().try_into().unwrap();
            let c = kpke_encrypt(backend, &set, &kp.ek, &m, &r).unwrap();
            assert_eq!(c, trace.bytes("c"), "{name}");
            assert_eq!(c.len(), set.ct_len());
            assert_eq!(kpke_decrypt(backend, &set, &kp.dk, &c).unwrap(), m);
        }
    }
}

#[test]
fn seed_expansion_binds_rank() {
    let d = [0x42u8; 32];
    for set in ParameterSet::ALL {
        let g = sha3_512(&[&d, &[set.k as u8]]);
        let direct = keygen_from_seeds(Backend::scalar(), &set, &g[..32].try_into().unwrap(), &g[32..].try_into().unwrap());
        assert_eq!(kpke_keygen(Backend::scalar(), &set, &d).ek, direct.ek);
    }
}

#[test]
fn ciphertext_lengths() {
    let lens: Vec<usize> = ParameterSet::ALL.iter().map(|s| s.ct_len()).collect();
    assert_eq!(lens, [768, 1088, 1568]);
}

#[test]
fn deterministic_and_distinct() {
    for set in ParameterSet::ALL {
        let a = kpke_keygen(Backend::scalar(), &set, &[1; 32]);
        let b = kpke_keygen(Backend::detect(), &set, &[1; 32]);
        let c = kpke_keygen(Backend::scalar(), &set, &[2; 32]);
        assert_eq!(a.ek, b.ek);
        assert_eq!(a.dk, b.dk);
        assert_ne!(a.ek, c.ek);
        let e1 = kpke_encrypt(Backend::scalar(), &set, &a.ek, &[3; 32], &[4; 32]).unwrap();
        let e2 = kpke_encrypt(Backend::detect(), &set, &a.ek, &[3; 32], &[4; 32]).unwrap();
        assert_eq!(e1, e2);
    }
}

#[test]
fn round_trip_random_triples() {
    let mut rng = ChaCha20Rng::seed_from_u64(30);
    let backend = Backend::detect();
    for set in ParameterSet::ALL {
        for _ in 0..1000 {
            let d: [u8; 32] = rng.gen();
            let m: [u8; 32] = rng.gen();
            let r: [u8; 32] = rng.gen();
            let kp = kpke_keygen(backend, &set, &d);
            let c = kpke_encrypt(backend, &set, &kp.ek, &m, &r).unwrap();
            assert_eq!(kpke_decrypt(backend, &set, &kp.dk, &c).unwrap(), m);
        }
    }
}

#[test]
fn decrypt_is_total() {
    let set = crate::params::ML_KEM_768;
    let kp = kpke_keygen(Backend::scalar(), &set, &[5; 32]);
    let mut c = kpke_encrypt(Backend::scalar(), &set, &kp.ek, &[6; 32], &[7; 32]).unwrap();
    c[10] ^= 0x40;
    c[set.ct_len() - 1] ^= 0xff;
    assert!(kpke_decrypt(Backend::scalar(), &set, &kp.dk, &c).is_ok());
    assert!(kpke_decrypt(Backend::scalar(), &set, &kp.dk, &c[1..]).is_err());
    assert!(kpke_encrypt(Backend::scalar(), &set, &kp.ek[1..], &[0; 32], &[0; 32]).is_err());
}

#[test]
fn encrypt_counter_counts() {
    let set = crate::params::ML_KEM_512;
    let kp = kpke_keygen(Backend::scalar(), &set, &[5; 32]);
    let before = encrypt_calls();
    for _ in 0..3 {
        kpke_encrypt(Backend::scalar(), &set, &kp.ek, &[6; 32], &[7; 32]).unwrap();
    }
    assert_eq!(encrypt_calls() - before, 3);
}


#[test]
fn keygen_many_matches_keygen() {
    let mut r = ChaCha20Rng::seed_from_u64(32);
    for b in backends() {
        for set in ParameterSet::ALL {
            for count in [1usize, 5, 8] {
                let ds: Vec<[u8; 32]> = (0..count).map(|_| r.gen()).collect();
                let many = kpke_keygen_many(b, &set, &ds);
                assert_eq!(many.len(), count);
                for (d, kp) in ds.iter().zip(&many) {
                    let one = kpke_keygen(Backend::scalar(), &set, d);
                    assert_eq!(kp.ek, one.ek);
                    assert_eq!(*kp.dk, *one.dk);
                }
            }
        }
    }
}
