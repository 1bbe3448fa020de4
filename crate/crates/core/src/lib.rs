//! ML-KEM with a wide-lane polynomial and Keccak core.
//!
//! The crate provides the three ML-KEM parameter sets, batch key generation
//! with an 8-way Keccak, and two IND-1-CCA transforms that skip the
//! re-encryption check in decapsulation:
//!
//! * [`Transform::Fo`]: ML-KEM as standardized (Fujisaki-Okamoto with implicit rejection).
//! * [`Transform::Tch`]: explicit rejection through a 32-byte key-confirmation tag.
//! * [`Transform::Trh`]: the key is `H(m, c)`, no ciphertext expansion.

pub mod codec;
pub mod error;
pub mod kat;
pub mod kem;
pub mod keccak;
pub mod params;
pub mod pke;
pub mod polyring;
pub mod rng;
pub mod sampling;

#[cfg(test)]
mod testdata;

pub use error::{Error, Result};
pub use kem::{EncapsResult, Kem, KemKeyPair, KemScheme, KeygenSeed, Transform};
pub use params::{get_params, ParameterSet, ParameterSetName};
pub use polyring::{Backend, NttLayout, NttPoly, Poly};
