use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{parse_counts_key, Register};
use crate::iceberg::{decode_readout, IcebergMeta};
use crate::pcs::PcsMeta;
use crate::sim::Counts;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostselectionReport {
    pub kept: u64,
    pub total: u64,
    pub keep_rate: f64,
    pub counts: BTreeMap<String, u64>,
}

impl PostselectionReport {
    fn new(total: u64, counts: BTreeMap<String, u64>) -> Self {
        let kept = counts.values().sum();
        let keep_rate = if total == 0 {
            0.0
        } else {
            kept as f64 / total as f64
        };
        PostselectionReport {
            kept,
            total,
            keep_rate,
            counts,
        }
    }

    pub fn filtered(&self) -> Counts {
        Counts {
            shots: self.kept,
            counts: self.counts.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PostselectError {
    #[error("key '{0}' does not match the classical register layout")]
    MalformedKey(String),
    #[error("register '{0}' is missing from the metadata")]
    MissingRegister(String),
    #[error("counts declare {declared} shots but hold {held}")]
    ShotMismatch { declared: u64, held: u64 },
}

fn check_total(counts: &Counts) -> Result<(), PostselectError> {
    let held: u64 = counts.counts.values().sum();
    if held != counts.shots {
        return Err(PostselectError::ShotMismatch {
            declared: counts.shots,
            held,
        });
    }
    Ok(())
}

/// Key groups in key order (reverse register declaration order), paired with
/// their register names.
fn split_groups<'k>(
    key: &'k str,
    cregs: &[Register],
) -> Result<Vec<(&'k str, String)>, PostselectError> {
    let regs: Vec<&Register> = cregs.iter().filter(|r| r.size > 0).rev().collect();
    let groups: Vec<&str> = if key.is_empty() {
        Vec::new()
    } else {
        key.split(' ').collect()
    };
    let valid = groups.len() == regs.len()
        && groups
            .iter()
            .zip(&regs)
            .all(|(g, r)| g.len() == r.size && g.bytes().all(|b| b == b'0' || b == b'1'));
    if !valid {
        return Err(PostselectError::MalformedKey(key.to_string()));
    }
    Ok(groups
        .into_iter()
        .zip(regs.into_iter().map(|r| r.name.clone()))
        .collect())
}

/// Keeps shots whose check group equals the expected bits and strips that group.
pub fn postselect_counts(
    counts: &Counts,
    meta: &PcsMeta,
) -> Result<PostselectionReport, PostselectError> {
    check_total(counts)?;
    let anc = &meta.ancilla_register.name;
    if !meta.cregs.iter().any(|r| &r.name == anc) {
        return Err(PostselectError::MissingRegister(anc.clone()));
    }
    let mut kept = BTreeMap::new();
    for (key, &v) in &counts.counts {
        let groups = split_groups(key, &meta.cregs)?;
        let (check_bits, _) = groups
            .iter()
            .find(|(_, name)| name == anc)
            .expect("register present");
        if *check_bits != meta.expected_ancilla_bits {
            continue;
        }
        let rest: Vec<&str> = groups
            .iter()
            .filter(|(_, name)| name != anc)
            .map(|(g, _)| *g)
            .collect();
        *kept.entry(rest.join(" ")).or_insert(0) += v;
    }
    Ok(PostselectionReport::new(counts.shots, kept))
}

fn offset(cregs: &[Register], name: &str) -> Result<(usize, usize), PostselectError> {
    let mut off = 0;
    for r in cregs {
        if r.name == name {
            return Ok((off, r.size));
        }
        off += r.size;
    }
    Err(PostselectError::MissingRegister(name.to_string()))
}

/// Keeps shots with a clean verification bit, all-zero syndromes and an
/// even-parity readout, then decodes the readout into `k` logical bits
/// (logical qubit 0 rightmost).
pub fn postselect_counts_iceberg(
    counts: &Counts,
    meta: &IcebergMeta,
) -> Result<PostselectionReport, PostselectError> {
    check_total(counts)?;
    let (verify, _) = offset(&meta.cregs, &meta.verify_register)?;
    let syndrome = match &meta.syndrome_register {
        Some(name) => Some(offset(&meta.cregs, name)?),
        None => None,
    };
    let (readout, width) = offset(&meta.cregs, &meta.readout_register)?;
    if width != meta.k + 2 {
        return Err(PostselectError::MissingRegister(
            meta.readout_register.clone(),
        ));
    }
    let mut kept = BTreeMap::new();
    for (key, &v) in &counts.counts {
        let bits = parse_counts_key(&meta.cregs, key)
            .ok_or_else(|| PostselectError::MalformedKey(key.clone()))?;
        if bits[verify] {
            continue;
        }
        if let Some((s, len)) = syndrome {
            if bits[s..s + len].iter().any(|&b| b) {
                continue;
            }
        }
        let (accept, logical) = decode_readout(&bits[readout..readout + width], meta)
            .map_err(|_| PostselectError::MalformedKey(key.clone()))?;
        if !accept {
            continue;
        }
        let text: String = logical
            .iter()
            .rev()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        *kept.entry(text).or_insert(0) += v;
    }
    Ok(PostselectionReport::new(counts.shots, kept))
}

/// Total variation distance between two normalized distributions.
pub fn tvd(p: &BTreeMap<String, f64>, q: &BTreeMap<String, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, &pv) in p {
        sum += (pv - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &qv) in q {
        if !p.contains_key(k) {
            sum += qv;
        }
    }
    sum / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcs::AncillaRegister;

    fn pcs_meta() -> PcsMeta {
        PcsMeta {
            checks: Vec::new(),
            expected_ancilla_bits: "00".into(),
            payload: (0, 0),
            ancilla_register: AncillaRegister {
                name: "anc".into(),
                bits: vec![2, 3],
            },
            cregs: vec![Register::new("c", 2), Register::new("anc", 2)],
            num_data_qubits: 2,
            inserted: Vec::new(),
        }
    }

    #[test]
    fn pcs_filtering() {
        let counts =
            Counts::from_map([("00 11".to_string(), 60), ("01 11".to_string(), 40)].into());
        let r = postselect_counts(&counts, &pcs_meta()).unwrap();
        assert_eq!(r.counts, BTreeMap::from([("11".to_string(), 60)]));
        assert_eq!((r.kept, r.total), (60, 100));
        assert!((r.keep_rate - 0.6).abs() < 1e-15);
    }

    #[test]
    fn malformed_keys_rejected() {
        let counts = Counts::from_map([("0011".to_string(), 1)].into());
        assert!(matches!(
            postselect_counts(&counts, &pcs_meta()),
            Err(PostselectError::MalformedKey(_))
        ));
        let bad_total = Counts {
            shots: 5,
            counts: [("00 11".to_string(), 1)].into(),
        };
        assert!(postselect_counts(&bad_total, &pcs_meta()).is_err());
    }

    #[test]
    fn iceberg_rules() {
        let meta = crate::iceberg::build_iceberg_circuit(&crate::Circuit::new(2, 0), 1)
            .unwrap()
            .1;
        // Groups: readout(4) syndrome(2) verify(1).
        let counts = Counts::from_map(
            [
                ("1111 00 0".to_string(), 5),
                ("0000 00 0".to_string(), 5),
                ("0110 00 0".to_string(), 3),
                ("0000 01 0".to_string(), 7),
                ("0001 00 0".to_string(), 11),
                ("0000 00 1".to_string(), 13),
            ]
            .into(),
        );
        let r = postselect_counts_iceberg(&counts, &meta).unwrap();
        assert_eq!(
            r.counts,
            BTreeMap::from([("00".to_string(), 10), ("11".to_string(), 3)])
        );
        assert_eq!(r.total, 44);
    }

    #[test]
    fn tvd_basics() {
        let p = BTreeMap::from([("0".to_string(), 1.0)]);
        let q = BTreeMap::from([("1".to_string(), 1.0)]);
        assert_eq!(tvd(&p, &q), 1.0);
        assert_eq!(tvd(&p, &p), 0.0);
    }
}
