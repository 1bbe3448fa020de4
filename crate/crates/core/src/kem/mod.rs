//! ML-KEM and the two re-encryption-free transforms, batch key generation
//! and a hybrid combiner.

mod hybrid;

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use subtle::{ConditionallySelectable, ConstantTimeEq};
use zeroize::Zeroizing;

use crate::codec::{check_len, deserialize_dk, dk_len, serialize_ct_tagged, serialize_dk, split_ct_tagged, Role};
use crate::error::{Error, Result};
use crate::keccak::{batch_absorb_squeeze, sha3_256, sha3_512, shake256, Variant, BATCH_WIDTH};
use crate::params::{ParameterSet, SYM_BYTES};
use crate::pke::{kpke_decrypt, kpke_encrypt, kpke_keygen, kpke_keygen_many};
use crate::polyring::Backend;
use crate::rng::{random_seed, CryptoRngCore};

pub use hybrid::{hybrid_decaps, hybrid_encaps, HybridKem, KemScheme, StubKem};

const TAG_DOMAIN: u8 = 0x01;
const KEY_DOMAIN: u8 = 0x02;

thread_local! {
    static BATCH_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of [`Kem::batch_keygen`] calls made on this thread.
pub fn batch_keygen_calls() -> u64 {
    BATCH_CALLS.with(|c| c.get())
}

/// How the KEM turns K-PKE into a key encapsulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// Fujisaki-Okamoto with re-encryption and implicit rejection (ML-KEM).
    Fo,
    /// Key-confirmation tag `H(0x01 || m)` appended to the ciphertext;
    /// explicit rejection.
    Tch,
    /// `K = H(0x02 || m || c)` with no re-encryption check.
    Trh,
}

impl Transform {
    pub const ALL: [Transform; 3] = [Transform::Fo, Transform::Tch, Transform::Trh];

    pub fn as_str(self) -> &'static str {
        match self {
            Transform::Fo => "fo",
            Transform::Tch => "tch",
            Transform::Trh => "trh",
        }
    }

    fn stores_hash(self) -> bool {
        self == Transform::Fo
    }

    fn stores_z(self) -> bool {
        self != Transform::Tch
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "fo" | "mlkem" => Ok(Transform::Fo),
            "tch" => Ok(Transform::Tch),
            "trh" => Ok(Transform::Trh),
            _ => Err(Error::InvalidParameter(format!("unknown transform `{s}`"))),
        }
    }
}

#[derive(Clone)]
pub struct KemKeyPair {
    pub transform: Transform,
    pub set: ParameterSet,
    pub ek: Vec<u8>,
    pub dk: Zeroizing<Vec<u8>>,
}

impl fmt::Debug for KemKeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KemKeyPair")
            .field("transform", &self.transform)
            .field("set", &self.set.name)
            .field("ek_len", &self.ek.len())
            .field("dk_len", &self.dk.len())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncapsResult {
    pub ct: Vec<u8>,
    pub shared_secret: [u8; 32],
}

/// Seeds for one deterministic key generation.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct KeygenSeed {
    pub d: [u8; 32],
    pub z: [u8; 32],
}

impl KeygenSeed {
    pub fn random(rng: &mut dyn CryptoRngCore) -> Self {
        KeygenSeed {
            d: random_seed(rng),
            z: random_seed(rng),
        }
    }

    /// Eight seed pairs for [`Kem::batch_keygen`]. With `shared_z` a single
    /// `z` is drawn and reused by all eight keys.
    pub fn random_batch(rng: &mut dyn CryptoRngCore, shared_z: bool) -> [KeygenSeed; BATCH_WIDTH] {
        let z0 = shared_z.then(|| random_seed(rng));
        core::array::from_fn(|_| {
            let d = random_seed(rng);
            KeygenSeed {
                d,
                z: z0.unwrap_or_else(|| random_seed(rng)),
            }
        })
    }
}

/// One transform over one parameter set, on one backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Kem {
    pub transform: Transform,
    pub set: ParameterSet,
    pub backend: Backend,
}

fn key_hash(m: &[u8; 32], c: &[u8]) -> [u8; 32] {
    sha3_256(&[&[KEY_DOMAIN], m, c])
}

fn tag_hash(m: &[u8; 32]) -> [u8; 32] {
    sha3_256(&[&[TAG_DOMAIN], m])
}

impl Kem {
    pub fn new(transform: Transform, set: ParameterSet) -> Self {
        Kem {
            transform,
            set,
            backend: Backend::current(),
        }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn ek_len(&self) -> usize {
        self.set.ek_len()
    }

    pub fn dk_len(&self) -> usize {
        dk_len(&self.set, self.transform.stores_hash(), self.transform.stores_z())
    }

    pub fn ct_len(&self) -> usize {
        match self.transform {
            Transform::Tch => self.set.ct_len() + SYM_BYTES,
            _ => self.set.ct_len(),
        }
    }

    /// Deterministic key generation. `z` is ignored by [`Transform::Tch`].
    pub fn keygen_derand(&self, seed: &KeygenSeed) -> KemKeyPair {
        let pke = kpke_keygen(self.backend, &self.set, &seed.d);
        let h = self.transform.stores_hash().then(|| sha3_256(&[&pke.ek]));
        self.assemble(pke.ek, &pke.dk, h.as_ref(), &seed.z)
    }

    fn assemble(&self, ek: Vec<u8>, dk_pke: &[u8], h: Option<&[u8; 32]>, z: &[u8; 32]) -> KemKeyPair {
        let dk = serialize_dk(dk_pke, &ek, h, self.transform.stores_z().then_some(z));
        KemKeyPair {
            transform: self.transform,
            set: self.set,
            ek,
            dk: Zeroizing::new(dk),
        }
    }

    pub fn keygen(&self, rng: &mut dyn CryptoRngCore) -> KemKeyPair {
        self.keygen_derand(&KeygenSeed::random(rng))
    }

    /// Eight FO key pairs generated together: every Keccak call of the
    /// eight key generations, down to the `H(ek)` digests, runs in full
    /// 8-way batches. Output `i` equals `keygen_derand(&seeds[i])`.
    pub fn batch_keygen(&self, seeds: &[KeygenSeed; BATCH_WIDTH]) -> Result<Vec<KemKeyPair>> {
        if self.transform != Transform::Fo {
            return Err(Error::InvalidParameter(format!(
                "batch key generation is defined for fo, not {}",
                self.transform
            )));
        }
        BATCH_CALLS.with(|c| c.set(c.get() + 1));
        let ds: Vec<[u8; 32]> = seeds.iter().map(|s| s.d).collect();
        let pkes = kpke_keygen_many(self.backend, &self.set, &ds);
        let eks: Vec<&[u8]> = pkes.iter().map(|p| p.ek.as_slice()).collect();
        let hashes = batch_absorb_squeeze(self.backend, Variant::Sha3_256, &eks, 32)?;
        Ok(pkes
            .iter()
            .zip(&hashes)
            .zip(seeds)
            .map(|((p, h), s)| {
                let h: [u8; 32] = h.as_slice().try_into().expect("32-byte digest");
                self.assemble(p.ek.clone(), &p.dk, Some(&h), &s.z)
            })
            .collect())
    }

    /// Encapsulation with caller-chosen message `m` and coins `r`. FO derives
    /// its coins from `m` and `H(ek)` and ignores `r`; the other transforms
    /// encrypt with `r` directly.
    pub fn encaps_derand(&self, ek: &[u8], m: &[u8; 32], r: &[u8; 32]) -> Result<EncapsResult> {
        check_len(Role::Ek, self.set.ek_len(), ek.len())?;
        match self.transform {
            Transform::Fo => {
                let g = sha3_512(&[m, &sha3_256(&[ek])]);
                let coins: [u8; 32] = g[32..].try_into().unwrap();
                let ct = kpke_encrypt(self.backend, &self.set, ek, m, &coins)?;
                Ok(EncapsResult {
                    ct,
                    shared_secret: g[..32].try_into().unwrap(),
                })
            }
            Transform::Tch => {
                let c = kpke_encrypt(self.backend, &self.set, ek, m, r)?;
                let shared_secret = key_hash(m, &c);
                Ok(EncapsResult {
                    ct: serialize_ct_tagged(&c, &tag_hash(m)),
                    shared_secret,
                })
            }
            Transform::Trh => {
                let ct = kpke_encrypt(self.backend, &self.set, ek, m, r)?;
                let shared_secret = key_hash(m, &ct);
                Ok(EncapsResult { ct, shared_secret })
            }
        }
    }

    pub fn encaps(&self, ek: &[u8], rng: &mut dyn CryptoRngCore) -> Result<EncapsResult> {
        let m = Zeroizing::new(random_seed(rng));
        let r = if self.transform == Transform::Fo {
            Zeroizing::new([0u8; 32])
        } else {
            Zeroizing::new(random_seed(rng))
        };
        self.encaps_derand(ek, &m, &r)
    }

    /// Recovers the shared secret. Only [`Transform::Tch`] can fail on a
    /// well-sized ciphertext, with [`Error::Rejected`].
    pub fn decaps(&self, dk: &[u8], ct: &[u8]) -> Result<[u8; 32]> {
        let parts = deserialize_dk(&self.set, dk, self.transform.stores_hash(), self.transform.stores_z())?;
        match self.transform {
            Transform::Fo => {
                check_len(Role::Ct, self.set.ct_len(), ct.len())?;
                let h = parts.h_ek.expect("fo keys store H(ek)");
                let z = parts.z.expect("fo keys store z");
                let m = Zeroizing::new(kpke_decrypt(self.backend, &self.set, parts.dk_pke, ct)?);
                let g = Zeroizing::new(sha3_512(&[&m[..], &h]));
                let coins: [u8; 32] = g[32..].try_into().unwrap();
                let c2 = kpke_encrypt(self.backend, &self.set, parts.ek, &m, &coins)?;
                let mut reject = [0u8; 32];
                shake256(&[&z, ct], &mut reject);
                let same = c2.ct_eq(ct);
                let mut k = reject;
                for (o, &g) in k.iter_mut().zip(&g[..32]) {
                    o.conditional_assign(&g, same);
                }
                Ok(k)
            }
            Transform::Tch => {
                let (c, tag) = split_ct_tagged(&self.set, ct)?;
                let m = Zeroizing::new(kpke_decrypt(self.backend, &self.set, parts.dk_pke, c)?);
                if bool::from(tag_hash(&m).ct_eq(&tag)) {
                    Ok(key_hash(&m, c))
                } else {
                    Err(Error::Rejected)
                }
            }
            Transform::Trh => {
                check_len(Role::Ct, self.set.ct_len(), ct.len())?;
                let m = Zeroizing::new(kpke_decrypt(self.backend, &self.set, parts.dk_pke, ct)?);
                Ok(key_hash(&m, ct))
            }
        }
    }
}
