//! Parameter sets.
//!
//! Every other module reads `k`, `eta1`, `eta2`, `du` and `dv` from here.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

pub const N: usize = 256;
pub const Q: i16 = 3329;

/// Byte length of every seed, message, hash output and shared secret.
pub const SYM_BYTES: usize = 32;

/// Bytes of one polynomial packed with 12 bits per coefficient.
pub const POLY_BYTES: usize = 384;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParameterSetName {
    MlKem512,
    MlKem768,
    MlKem1024,
}

impl ParameterSetName {
    pub const ALL: [ParameterSetName; 3] = [Self::MlKem512, Self::MlKem768, Self::MlKem1024];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MlKem512 => "ML-KEM-512",
            Self::MlKem768 => "ML-KEM-768",
            Self::MlKem1024 => "ML-KEM-1024",
        }
    }
}

impl fmt::Display for ParameterSetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParameterSetName {
    type Err = Error;

    /// Accepts `ML-KEM-768`, `mlkem768`, `768` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.trim_start_matches("mlkem") {
            "512" => Ok(Self::MlKem512),
            "768" => Ok(Self::MlKem768),
            "1024" => Ok(Self::MlKem1024),
            _ => Err(Error::InvalidParameter(format!("unknown parameter set `{s}`"))),
        }
    }
}

/// One ML-KEM parameter set and its derived byte lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParameterSet {
    pub name: ParameterSetName,
    pub k: usize,
    pub eta1: usize,
    pub eta2: usize,
    pub du: usize,
    pub dv: usize,
}

pub const ML_KEM_512: ParameterSet = ParameterSet {
    name: ParameterSetName::MlKem512,
    k: 2,
    eta1: 3,
    eta2: 2,
    du: 10,
    dv: 4,
};

pub const ML_KEM_768: ParameterSet = ParameterSet {
    name: ParameterSetName::MlKem768,
    k: 3,
    eta1: 2,
    eta2: 2,
    du: 10,
    dv: 4,
};

pub const ML_KEM_1024: ParameterSet = ParameterSet {
    name: ParameterSetName::MlKem1024,
    k: 4,
    eta1: 2,
    eta2: 2,
    du: 11,
    dv: 5,
};

impl ParameterSet {
    pub const ALL: [ParameterSet; 3] = [ML_KEM_512, ML_KEM_768, ML_KEM_1024];

    pub const fn n(&self) -> usize {
        N
    }

    pub const fn q(&self) -> i16 {
        Q
    }

    /// Encapsulation key: `k` packed polynomials followed by the matrix seed.
    pub const fn ek_len(&self) -> usize {
        POLY_BYTES * self.k + SYM_BYTES
    }

    /// K-PKE decryption key: `k` packed polynomials.
    pub const fn dk_pke_len(&self) -> usize {
        POLY_BYTES * self.k
    }

    /// Full ML-KEM decapsulation key `dk_pke ‖ ek ‖ H(ek) ‖ z`.
    pub const fn dk_len(&self) -> usize {
        768 * self.k + 96
    }

    /// K-PKE ciphertext length.
    pub const fn ct_len(&self) -> usize {
        32 * (self.du * self.k + self.dv)
    }

    pub const fn ct_u_len(&self) -> usize {
        32 * self.du * self.k
    }
}

/// Looks up a parameter set by name.
pub fn get_params(name: &str) -> Result<ParameterSet> {
    name.parse::<ParameterSetName>().map(ParameterSet::from)
}

impl From<ParameterSetName> for ParameterSet {
    fn from(name: ParameterSetName) -> Self {
        match name {
            ParameterSetName::MlKem512 => ML_KEM_512,
            ParameterSetName::MlKem768 => ML_KEM_768,
            ParameterSetName::MlKem1024 => ML_KEM_1024,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lengths() {
        let p = get_params("ML-KEM-512").unwrap();
        assert_eq!((p.ct_len(), p.ek_len(), p.dk_len()), (768, 800, 1632));
        assert_eq!(get_params("ML-KEM-768").unwrap().ct_len(), 1088);
        assert_eq!(get_params("ML-KEM-1024").unwrap().ct_len(), 1568);
    }

    #[test]
    fn derived_lengths_follow_formulas() {
        for p in ParameterSet::ALL {
            assert_eq!(p.n(), 256);
            assert_eq!(p.q(), 3329);
            assert_eq!(p.ek_len(), 384 * p.k + 32);
            assert_eq!(p.dk_len(), 768 * p.k + 96);
            assert_eq!(p.dk_len(), p.dk_pke_len() + p.ek_len() + 64);
            assert_eq!(p.ct_len(), 32 * (p.du * p.k + p.dv));
        }
    }

    #[test]
    fn per_set_constants() {
        let got: Vec<_> = ParameterSet::ALL
            .iter()
            .map(|p| (p.k, p.eta1, p.eta2, p.du, p.dv))
            .collect();
        assert_eq!(got, vec![(2, 3, 2, 10, 4), (3, 2, 2, 10, 4), (4, 2, 2, 11, 5)]);
    }

    #[test]
    fn name_parsing() {
        assert_eq!("mlkem768".parse::<ParameterSetName>().unwrap(), ParameterSetName::MlKem768);
        assert_eq!("1024".parse::<ParameterSetName>().unwrap(), ParameterSetName::MlKem1024);
        assert!(matches!(get_params("ML-KEM-2048"), Err(Error::InvalidParameter(_))));
        for n in ParameterSetName::ALL {
            assert_eq!(n.as_str().parse::<ParameterSetName>().unwrap(), n);
        }
    }
}
