use zeroize::Zeroizing;

use super::Kem;
use crate::error::{Error, Result};
use crate::keccak::sha3_256;
use crate::rng::{random_seed, CryptoRngCore};

/// A key encapsulation mechanism with byte-string keys, used by the hybrid
/// combiner and the handshake harness.
pub trait KemScheme: Send + Sync {
    fn name(&self) -> String;
    fn ek_len(&self) -> usize;
    fn dk_len(&self) -> usize;
    fn ct_len(&self) -> usize;
    fn keygen(&self, rng: &mut dyn CryptoRngCore) -> (Vec<u8>, Zeroizing<Vec<u8>>);
    fn encaps(&self, ek: &[u8], rng: &mut dyn CryptoRngCore) -> Result<(Vec<u8>, [u8; 32])>;
    fn decaps(&self, dk: &[u8], ct: &[u8]) -> Result<[u8; 32]>;
}

impl KemScheme for Kem {
    fn name(&self) -> String {
        format!("{}/{}", self.set.name, self.transform)
    }

    fn ek_len(&self) -> usize {
        Kem::ek_len(self)
    }

    fn dk_len(&self) -> usize {
        Kem::dk_len(self)
    }

    fn ct_len(&self) -> usize {
        Kem::ct_len(self)
    }

    fn keygen(&self, rng: &mut dyn CryptoRngCore) -> (Vec<u8>, Zeroizing<Vec<u8>>) {
        let kp = Kem::keygen(self, rng);
        (kp.ek, kp.dk)
    }

    fn encaps(&self, ek: &[u8], rng: &mut dyn CryptoRngCore) -> Result<(Vec<u8>, [u8; 32])> {
        let r = Kem::encaps(self, ek, rng)?;
        Ok((r.ct, r.shared_secret))
    }

    fn decaps(&self, dk: &[u8], ct: &[u8]) -> Result<[u8; 32]> {
        Kem::decaps(self, dk, ct)
    }
}

/// Deterministic stand-in KEM for tests: `ek = H(sk)`, `ct = r`,
/// `K = H(ek || r)`. Anyone holding `ek` can compute `K`; it offers no
/// security at all.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubKem;

impl KemScheme for StubKem {
    fn name(&self) -> String {
        "stub".into()
    }

    fn ek_len(&self) -> usize {
        32
    }

    fn dk_len(&self) -> usize {
        32
    }

    fn ct_len(&self) -> usize {
        32
    }

    fn keygen(&self, rng: &mut dyn CryptoRngCore) -> (Vec<u8>, Zeroizing<Vec<u8>>) {
        let sk = random_seed(rng);
        (sha3_256(&[b"stub ek", &sk]).to_vec(), Zeroizing::new(sk.to_vec()))
    }

    fn encaps(&self, ek: &[u8], rng: &mut dyn CryptoRngCore) -> Result<(Vec<u8>, [u8; 32])> {
        if ek.len() != 32 {
            return Err(Error::MalformedInput { role: "ek", expected: 32, actual: ek.len() });
        }
        let r = random_seed(rng);
        Ok((r.to_vec(), sha3_256(&[ek, &r])))
    }

    fn decaps(&self, dk: &[u8], ct: &[u8]) -> Result<[u8; 32]> {
        if dk.len() != 32 {
            return Err(Error::MalformedInput { role: "dk", expected: 32, actual: dk.len() });
        }
        if ct.len() != 32 {
            return Err(Error::MalformedInput { role: "ct", expected: 32, actual: ct.len() });
        }
        let ek = sha3_256(&[b"stub ek", dk]);
        Ok(sha3_256(&[&ek, ct]))
    }
}

/// `K = SHA3-256(K_a || K_b || ct_a || ct_b)` over two KEMs.
pub fn hybrid_encaps(
    kem_a: &dyn KemScheme,
    kem_b: &dyn KemScheme,
    ek_a: &[u8],
    ek_b: &[u8],
    rng: &mut dyn CryptoRngCore,
) -> Result<(Vec<u8>, [u8; 32])> {
    let (ct_a, k_a) = kem_a.encaps(ek_a, rng)?;
    let (ct_b, k_b) = kem_b.encaps(ek_b, rng)?;
    let k = sha3_256(&[&k_a, &k_b, &ct_a, &ct_b]);
    let mut ct = ct_a;
    ct.extend_from_slice(&ct_b);
    Ok((ct, k))
}

pub fn hybrid_decaps(
    kem_a: &dyn KemScheme,
    kem_b: &dyn KemScheme,
    dk_a: &[u8],
    dk_b: &[u8],
    ct: &[u8],
) -> Result<[u8; 32]> {
    let expected = kem_a.ct_len() + kem_b.ct_len();
    if ct.len() != expected {
        return Err(Error::MalformedInput { role: "ct", expected, actual: ct.len() });
    }
    let (ct_a, ct_b) = ct.split_at(kem_a.ct_len());
    let k_a = kem_a.decaps(dk_a, ct_a)?;
    let k_b = kem_b.decaps(dk_b, ct_b)?;
    Ok(sha3_256(&[&k_a, &k_b, ct_a, ct_b]))
}

/// Two KEMs run side by side as one, with keys and ciphertexts concatenated.
pub struct HybridKem {
    pub a: Box<dyn KemScheme>,
    pub b: Box<dyn KemScheme>,
}

impl HybridKem {
    pub fn new(a: Box<dyn KemScheme>, b: Box<dyn KemScheme>) -> Self {
        HybridKem { a, b }
    }
}

impl KemScheme for HybridKem {
    fn name(&self) -> String {
        format!("{}+{}", self.a.name(), self.b.name())
    }

    fn ek_len(&self) -> usize {
        self.a.ek_len() + self.b.ek_len()
    }

    fn dk_len(&self) -> usize {
        self.a.dk_len() + self.b.dk_len()
    }

    fn ct_len(&self) -> usize {
        self.a.ct_len() + self.b.ct_len()
    }

    fn keygen(&self, rng: &mut dyn CryptoRngCore) -> (Vec<u8>, Zeroizing<Vec<u8>>) {
        let (mut ek, dk_a) = self.a.keygen(rng);
        let (ek_b, dk_b) = self.b.keygen(rng);
        ek.extend_from_slice(&ek_b);
        let mut dk = Zeroizing::new(dk_a.to_vec());
        dk.extend_from_slice(&dk_b);
        (ek, dk)
    }

    fn encaps(&self, ek: &[u8], rng: &mut dyn CryptoRngCore) -> Result<(Vec<u8>, [u8; 32])> {
        if ek.len() != self.ek_len() {
            return Err(Error::MalformedInput { role: "ek", expected: self.ek_len(), actual: ek.len() });
        }
        let (ek_a, ek_b) = ek.split_at(self.a.ek_len());
        hybrid_encaps(self.a.as_ref(), self.b.as_ref(), ek_a, ek_b, rng)
    }

    fn decaps(&self, dk: &[u8], ct: &[u8]) -> Result<[u8; 32]> {
        if dk.len() != self.dk_len() {
            return Err(Error::MalformedInput { role: "dk", expected: self.dk_len(), actual: dk.len() });
        }
        let (dk_a, dk_b) = dk.split_at(self.a.dk_len());
        hybrid_decaps(self.a.as_ref(), self.b.as_ref(), dk_a, dk_b, ct)
    }
}
