//! Registered key-exchange suites and their stable 2-byte ids.
//!
//! `0x0100 | set << 4 | transform` for ML-KEM alone and `0x0200 | ...` for
//! the FFDH-2048 hybrid, with set 1/2/3 for 512/768/1024 and transform
//! 0/1/2 for fo/tch/trh.

use crate::error::{HarnessError, Result};
use crate::ffdh::FfdhKem;
use pqkem::kem::HybridKem;
use pqkem::{Backend, Kem, KemScheme, ParameterSet, ParameterSetName, Transform};
use std::fmt;
use std::str::FromStr;

pub const FINISHED_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Suite {
    pub set: ParameterSet,
    pub transform: Transform,
    pub hybrid: bool,
}

fn set_code(set: &ParameterSet) -> u16 {
    match set.name {
        ParameterSetName::MlKem512 => 1,
        ParameterSetName::MlKem768 => 2,
        ParameterSetName::MlKem1024 => 3,
    }
}

fn transform_code(t: Transform) -> u16 {
    match t {
        Transform::Fo => 0,
        Transform::Tch => 1,
        Transform::Trh => 2,
    }
}

impl Suite {
    pub fn new(set: ParameterSet, transform: Transform, hybrid: bool) -> Self {
        Suite { set, transform, hybrid }
    }

    pub fn all() -> Vec<Suite> {
        let mut out = Vec::with_capacity(18);
        for hybrid in [false, true] {
            for set in ParameterSet::ALL {
                for t in Transform::ALL {
                    out.push(Suite::new(set, t, hybrid));
                }
            }
        }
        out
    }

    pub fn id(&self) -> u16 {
        let family = if self.hybrid { 0x0200 } else { 0x0100 };
        family | set_code(&self.set) << 4 | transform_code(self.transform)
    }

    pub fn from_id(id: u16) -> Result<Suite> {
        Suite::all().into_iter().find(|s| s.id() == id).ok_or(HarnessError::UnknownKemId(id))
    }

    pub fn pq_kem(&self, backend: Backend) -> Kem {
        Kem::new(self.transform, self.set).with_backend(backend)
    }

    pub fn scheme(&self, backend: Backend) -> Box<dyn KemScheme> {
        let pq = Box::new(self.pq_kem(backend));
        if self.hybrid {
            Box::new(HybridKem::new(pq, Box::new(FfdhKem)))
        } else {
            pq
        }
    }

    pub fn ek_len(&self) -> usize {
        Kem::new(self.transform, self.set).ek_len() + if self.hybrid { FfdhKem.ek_len() } else { 0 }
    }

    pub fn ct_len(&self) -> usize {
        Kem::new(self.transform, self.set).ct_len() + if self.hybrid { FfdhKem.ct_len() } else { 0 }
    }

    /// Expected body lengths of client_hello, server_hello and finished.
    pub fn client_hello_len(&self) -> usize {
        self.ek_len()
    }

    pub fn server_hello_len(&self) -> usize {
        self.ct_len() + FINISHED_LEN
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.set.name, self.transform)?;
        if self.hybrid {
            f.write_str("+ffdh2048")?;
        }
        Ok(())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    /// Accepts a display name such as `ML-KEM-768/trh+ffdh2048` or a hex id.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            let id = u16::from_str_radix(hex, 16).map_err(|_| HarnessError::Protocol(format!("bad kem id {s:?}")))?;
            return Suite::from_id(id);
        }
        Suite::all()
            .into_iter()
            .find(|x| x.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| HarnessError::Protocol(format!("unknown suite {s:?}")))
    }
}
