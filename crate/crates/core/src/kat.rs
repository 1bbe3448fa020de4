//! Reader and verifier for NIST-style `.rsp` known-answer files.
//!
//! A file is a sequence of records separated by blank lines. Each record
//! starts with `count = N` and carries hex fields among `z`, `d`, `msg`,
//! `pk`, `sk`, `ct` and `ss`. A record is checked against every relation
//! its fields allow: key generation from `d`/`z`, encapsulation from
//! `pk`/`msg`, decapsulation from `sk`/`ct`.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::kem::{Kem, KeygenSeed, Transform};
use crate::params::{ParameterSet, ParameterSetName};
use crate::polyring::Backend;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no records found")]
    Empty,
    #[error("record {record}: field `{field}` does not match")]
    Mismatch { record: u64, field: &'static str },
    #[error("record {record}: {message}")]
    Invalid { record: u64, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatRecord {
    pub count: u64,
    /// Line of the `count` entry.
    pub line: usize,
    pub fields: BTreeMap<String, Vec<u8>>,
}

impl KatRecord {
    fn get(&self, k: &str) -> Option<&[u8]> {
        self.fields.get(k).map(|v| v.as_slice())
    }

    fn seed(&self, k: &str) -> Result<Option<[u8; 32]>, KatError> {
        match self.get(k) {
            None => Ok(None),
            Some(v) => v.try_into().map(Some).map_err(|_| KatError::Invalid {
                record: self.count,
                message: format!("`{k}` must be 32 bytes, got {}", v.len()),
            }),
        }
    }
}

pub fn parse_rsp(text: &str) -> Result<Vec<KatRecord>, KatError> {
    let mut records: Vec<KatRecord> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') || l.starts_with('[') {
            continue;
        }
        let Some((key, value)) = l.split_once('=') else {
            return Err(KatError::Parse {
                line,
                message: format!("expected `key = value`, got `{l}`"),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if key == "count" {
            let count = value.parse().map_err(|_| KatError::Parse {
                line,
                message: format!("bad count `{value}`"),
            })?;
            records.push(KatRecord {
                count,
                line,
                fields: BTreeMap::new(),
            });
            continue;
        }
        let Some(rec) = records.last_mut() else {
            return Err(KatError::Parse {
                line,
                message: format!("`{key}` before the first count"),
            });
        };
        let bytes = hex::decode(value).map_err(|e| KatError::Parse {
            line,
            message: format!("`{key}`: {e}"),
        })?;
        if rec.fields.insert(key.clone(), bytes).is_some() {
            return Err(KatError::Parse {
                line,
                message: format!("duplicate `{key}`"),
            });
        }
    }
    if records.is_empty() {
        return Err(KatError::Empty);
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KatSummary {
    pub records: usize,
    pub keygen: usize,
    pub encaps: usize,
    pub decaps: usize,
}

impl KatSummary {
    pub fn checks(&self) -> usize {
        self.keygen + self.encaps + self.decaps
    }
}

fn expect(rec: &KatRecord, field: &'static str, got: &[u8]) -> Result<(), KatError> {
    match rec.get(field) {
        Some(want) if want != got => Err(KatError::Mismatch {
            record: rec.count,
            field,
        }),
        _ => Ok(()),
    }
}

/// Checks one record against ML-KEM on `backend`, adding to `summary`.
pub fn verify_record(
    set: ParameterSet,
    backend: Backend,
    rec: &KatRecord,
    summary: &mut KatSummary,
) -> Result<(), KatError> {
    let kem = Kem::new(Transform::Fo, set).with_backend(backend);
    let invalid = |e: crate::Error| KatError::Invalid {
        record: rec.count,
        message: e.to_string(),
    };
    let mut checked = false;
    if let (Some(d), Some(z)) = (rec.seed("d")?, rec.seed("z")?) {
        let kp = kem.keygen_derand(&KeygenSeed { d, z });
        expect(rec, "pk", &kp.ek)?;
        expect(rec, "sk", &kp.dk)?;
        summary.keygen += 1;
        checked = true;
    }
    if let (Some(pk), Some(m)) = (rec.get("pk"), rec.seed("msg")?) {
        let r = kem.encaps_derand(pk, &m, &[0; 32]).map_err(invalid)?;
        expect(rec, "ct", &r.ct)?;
        expect(rec, "ss", &r.shared_secret)?;
        summary.encaps += 1;
        checked = true;
    }
    if let (Some(sk), Some(ct), Some(_)) = (rec.get("sk"), rec.get("ct"), rec.get("ss")) {
        let k = kem.decaps(sk, ct).map_err(invalid)?;
        expect(rec, "ss", &k)?;
        summary.decaps += 1;
        checked = true;
    }
    if !checked {
        return Err(KatError::Invalid {
            record: rec.count,
            message: "no checkable combination of fields".into(),
        });
    }
    summary.records += 1;
    Ok(())
}

/// Parses and checks a whole file; stops at the first failure.
pub fn verify_rsp(set: ParameterSet, backend: Backend, text: &str) -> Result<KatSummary, KatError> {
    let mut summary = KatSummary::default();
    for rec in parse_rsp(text)? {
        verify_record(set, backend, &rec, &mut summary)?;
    }
    Ok(summary)
}

pub fn verify_rsp_file(set: ParameterSet, backend: Backend, path: &Path) -> Result<KatSummary, KatError> {
    let text = std::fs::read_to_string(path).map_err(|e| KatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    verify_rsp(set, backend, &text)
}

/// Guesses the parameter set from a file name such as `ml-kem-768.rsp`.
pub fn set_from_path(path: &Path) -> Option<ParameterSet> {
    let name = path.file_name()?.to_str()?.to_ascii_lowercase();
    ParameterSetName::ALL
        .into_iter()
        .rev()
        .find(|n| name.contains(&n.as_str().to_ascii_lowercase()) || name.contains(&n.as_str()[7..]))
        .map(ParameterSet::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ML_KEM_512;

    fn sample() -> String {
        let kem = Kem::new(Transform::Fo, ML_KEM_512);
        let kp = kem.keygen_derand(&KeygenSeed { d: [1; 32], z: [2; 32] });
        let r = kem.encaps_derand(&kp.ek, &[3; 32], &[0; 32]).unwrap();
        format!(
            "# test\n\ncount = 0\nz = {}\nd = {}\nmsg = {}\npk = {}\nsk = {}\nct = {}\nss = {}\n\ncount = 1\nsk = {}\nct = {}\nss = {}\n",
            hex::encode([2u8; 32]),
            hex::encode_upper([1u8; 32]),
            hex::encode([3u8; 32]),
            hex::encode_upper(&kp.ek),
            hex::encode(&kp.dk[..]),
            hex::encode(&r.ct),
            hex::encode(r.shared_secret),
            hex::encode(&kp.dk[..]),
            hex::encode(&r.ct),
            hex::encode(r.shared_secret),
        )
    }

    #[test]
    fn parses_and_verifies() {
        let text = sample();
        let recs = parse_rsp(&text).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].line, 3);
        let s = verify_rsp(ML_KEM_512, Backend::scalar(), &text).unwrap();
        assert_eq!(s, KatSummary { records: 2, keygen: 1, encaps: 1, decaps: 2 });
    }

    #[test]
    fn corrupted_digit_fails_at_record() {
        let text = sample();
        let idx = text.rfind("ss = ").unwrap() + 5;
        let mut bytes = text.into_bytes();
        bytes[idx] = if bytes[idx] == b'0' { b'1' } else { b'0' };
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            verify_rsp(ML_KEM_512, Backend::scalar(), &text),
            Err(KatError::Mismatch { record: 1, field: "ss" })
        );
    }

    #[test]
    fn empty_and_malformed_files() {
        assert_eq!(parse_rsp(""), Err(KatError::Empty));
        assert_eq!(parse_rsp("# only comments\n\n"), Err(KatError::Empty));
        assert!(matches!(parse_rsp("count = 0\npk = 0g\n"), Err(KatError::Parse { line: 2, .. })));
        assert!(matches!(parse_rsp("pk = 00\n"), Err(KatError::Parse { line: 1, .. })));
        assert!(matches!(parse_rsp("count = 0\nnonsense\n"), Err(KatError::Parse { line: 2, .. })));
        assert!(matches!(
            verify_rsp(ML_KEM_512, Backend::scalar(), "count = 7\npk = 00\n"),
            Err(KatError::Invalid { record: 7, .. })
        ));
    }

    #[test]
    fn set_from_file_name() {
        assert_eq!(set_from_path(Path::new("kat/ml-kem-768.rsp")).unwrap().k, 3);
        assert_eq!(set_from_path(Path::new("ML-KEM-1024.rsp")).unwrap().k, 4);
        assert_eq!(set_from_path(Path::new("kyber512.rsp")).unwrap().k, 2);
        assert!(set_from_path(Path::new("vectors.rsp")).is_none());
    }
}
