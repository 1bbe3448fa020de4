//! Intermediate values for one deterministic ML-KEM run per parameter set.

use crate::params::ParameterSetName;

pub struct Trace {
    entries: Vec<(String, String)>,
}

impl Trace {
    pub fn load(name: ParameterSetName) -> Trace {
        let text = match name {
            ParameterSetName::MlKem512 => include_str!("../tests/data/ML-KEM-512.txt"),
            ParameterSetName::MlKem768 => include_str!("../tests/data/ML-KEM-768.txt"),
            ParameterSetName::MlKem1024 => include_str!("../tests/data/ML-KEM-1024.txt"),
        };
        let entries = text
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Trace { entries }
    }

    /// Values recorded under `key`, in file order.
    pub fn all(&self, key: &str) -> Vec<&str> {
        self.entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    pub fn first(&self, key: &str) -> &str {
        self.all(key).first().copied().unwrap_or_else(|| panic!("no `{key}` in trace"))
    }

    /// The hex form of the value; lines may carry a coefficient list first.
    pub fn bytes(&self, key: &str) -> Vec<u8> {
        let v = self.first(key);
        hex::decode(v.rsplit(" = ").next().unwrap()).unwrap()
    }

    pub fn seed(&self, key: &str) -> [u8; 32] {
        self.bytes(key).try_into().unwrap()
    }

    pub fn coeffs(&self, key: &str) -> [i16; 256] {
        let v = self.first(key);
        let inner = &v[v.find('{').unwrap() + 1..v.find('}').unwrap()];
        let list: Vec<i16> = inner
            .split(',')
            .map(|s| s.trim().parse().unwrap())
            .collect();
        list.try_into().unwrap()
    }
}
