//! Finite-field Diffie-Hellman over the 2048-bit MODP group of RFC 3526,
//! packaged as a KEM so it can stand in as the classical half of a hybrid.
//!
//! ek = g^x mod p, ct = g^y mod p, K = SHA3-256(g^xy ‖ ct ‖ ek), all
//! group elements as 256-byte big-endian strings.

use num_bigint::BigUint;
use pqkem::keccak::sha3_256;
use pqkem::kem::KemScheme;
use pqkem::rng::CryptoRngCore;
use pqkem::{Error, Result};
use std::sync::OnceLock;
use zeroize::Zeroizing;

const P_HEX: &str = concat!(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74",
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437",
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED",
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05",
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB",
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B",
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718",
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF",
);

pub const ELEMENT_LEN: usize = 256;
pub const EXPONENT_LEN: usize = 32;

pub fn modulus() -> &'static BigUint {
    static P: OnceLock<BigUint> = OnceLock::new();
    P.get_or_init(|| BigUint::parse_bytes(P_HEX.as_bytes(), 16).expect("valid modulus"))
}

fn to_fixed(x: &BigUint) -> Vec<u8> {
    let raw = x.to_bytes_be();
    let mut out = vec![0u8; ELEMENT_LEN - raw.len()];
    out.extend_from_slice(&raw);
    out
}

/// Parses a group element, rejecting 0, 1, p-1 and anything >= p.
fn parse_element(bytes: &[u8], role: &'static str) -> Result<BigUint> {
    if bytes.len() != ELEMENT_LEN {
        return Err(Error::MalformedInput { role, expected: ELEMENT_LEN, actual: bytes.len() });
    }
    let p = modulus();
    let x = BigUint::from_bytes_be(bytes);
    let one = BigUint::from(1u8);
    if x <= one || x >= p - &one {
        return Err(Error::InvalidArgument(format!("{role} is not a valid group element")));
    }
    Ok(x)
}

fn random_exponent(rng: &mut dyn CryptoRngCore) -> Zeroizing<[u8; EXPONENT_LEN]> {
    let mut x = Zeroizing::new([0u8; EXPONENT_LEN]);
    rng.fill_bytes(x.as_mut());
    x[0] |= 0x80;
    x
}

fn pow_g(x: &[u8]) -> BigUint {
    BigUint::from(2u8).modpow(&BigUint::from_bytes_be(x), modulus())
}

/// The classical KEM. dk = x ‖ ek.
#[derive(Debug, Clone, Copy, Default)]
pub struct FfdhKem;

impl KemScheme for FfdhKem {
    fn name(&self) -> String {
        "ffdh2048".into()
    }

    fn ek_len(&self) -> usize {
        ELEMENT_LEN
    }

    fn dk_len(&self) -> usize {
        EXPONENT_LEN + ELEMENT_LEN
    }

    fn ct_len(&self) -> usize {
        ELEMENT_LEN
    }

    fn keygen(&self, rng: &mut dyn CryptoRngCore) -> (Vec<u8>, Zeroizing<Vec<u8>>) {
        let x = random_exponent(rng);
        let ek = to_fixed(&pow_g(x.as_ref()));
        let mut dk = Zeroizing::new(Vec::with_capacity(self.dk_len()));
        dk.extend_from_slice(x.as_ref());
        dk.extend_from_slice(&ek);
        (ek, dk)
    }

    fn encaps(&self, ek: &[u8], rng: &mut dyn CryptoRngCore) -> Result<(Vec<u8>, [u8; 32])> {
        let pk = parse_element(ek, "ek")?;
        let y = random_exponent(rng);
        let ct = to_fixed(&pow_g(y.as_ref()));
        let shared = Zeroizing::new(to_fixed(&pk.modpow(&BigUint::from_bytes_be(y.as_ref()), modulus())));
        Ok((ct.clone(), sha3_256(&[&shared, &ct, ek])))
    }

    fn decaps(&self, dk: &[u8], ct: &[u8]) -> Result<[u8; 32]> {
        if dk.len() != self.dk_len() {
            return Err(Error::MalformedInput { role: "dk", expected: self.dk_len(), actual: dk.len() });
        }
        let peer = parse_element(ct, "ct")?;
        let (x, ek) = dk.split_at(EXPONENT_LEN);
        let shared = Zeroizing::new(to_fixed(&peer.modpow(&BigUint::from_bytes_be(x), modulus())));
        Ok(sha3_256(&[&shared, ct, ek]))
    }
}
