mod common;

use std::collections::BTreeMap;

use common::*;
use qedc::iceberg::{build_iceberg_circuit, decode_readout, IcebergMeta};
use qedc::postprocess::{postselect_counts_iceberg, tvd};
use qedc::sim::{exact_distribution, sample, NoiseModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exact logical distribution after the acceptance rule, plus the accepted mass.
fn accepted_logical(
    dist: &BTreeMap<String, f64>,
    meta: &IcebergMeta,
) -> (f64, BTreeMap<String, f64>) {
    let mut out = BTreeMap::new();
    let mut mass = 0.0;
    for (key, &p) in dist {
        // Groups appear in reverse declaration order: readout, [syndrome], verify.
        let groups: Vec<&str> = key.split(' ').collect();
        let flags_clean = groups[1..].iter().all(|g| g.chars().all(|c| c == '0'));
        let readout: Vec<bool> = groups[0].chars().rev().map(|c| c == '1').collect();
        let (accept, logical) = decode_readout(&readout, meta).unwrap();
        if flags_clean && accept {
            mass += p;
            let text: String = logical
                .iter()
                .rev()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            *out.entry(text).or_insert(0.0) += p;
        }
    }
    for v in out.values_mut() {
        *v /= mass;
    }
    (mass, out)
}

#[test]
fn noiseless_encoding_preserves_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..12 {
        let k = if case % 3 == 2 { 4 } else { 2 };
        let logical = random_unitary_circuit(&mut rng, k, 8);
        let cycles = case % 3;
        let (enc, meta) = build_iceberg_circuit(&logical, cycles).unwrap();
        assert_eq!(enc.num_qubits(), k + 4);
        let (mass, got) = accepted_logical(&exact_distribution(&enc).unwrap(), &meta);
        assert!(
            (mass - 1.0).abs() < 1e-9,
            "case {case}: accepted mass {mass}"
        );
        let mut reference = logical.clone();
        reference.measure_all();
        assert!(
            tvd(&got, &exact_distribution(&reference).unwrap()) < 1e-9,
            "case {case}"
        );
    }
}

#[test]
fn noiseless_qaoa_keeps_everything() {
    let (enc, meta) = build_iceberg_circuit(&qaoa_ring(4, 0.6, 0.3), 2).unwrap();
    let counts = sample(&enc, &NoiseModel::noiseless(), 2000, 9).unwrap();
    let report = postselect_counts_iceberg(&counts, &meta).unwrap();
    assert_eq!(report.keep_rate, 1.0);
    assert!(report.counts.keys().all(|k| k.len() == 4));
}

#[test]
fn single_faults_detected_or_harmless_k2() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for cycles in 1..=2 {
        let logical = random_clifford_logical(&mut rng, 2, 6);
        let audit = iceberg_fault_audit(&logical, cycles);
        assert!(
            audit.failures.is_empty(),
            "cycles {cycles}: {:?}",
            audit.failures
        );
        assert_eq!(audit.flagged + audit.harmless, audit.total);
        assert!(audit.flagged > audit.harmless);
    }
}

/// Without syndrome cycles nothing measures S_x, so a Z fault between two
/// rxx gates changes the readout unnoticed.
#[test]
fn zero_cycles_miss_mid_circuit_z_faults() {
    let mut logical = qedc::Circuit::new(2, 0);
    logical
        .rxx(std::f64::consts::FRAC_PI_2, 0, 1)
        .rxx(std::f64::consts::FRAC_PI_2, 0, 1);
    assert!(!iceberg_fault_audit(&logical, 0).failures.is_empty());
    assert!(iceberg_fault_audit(&logical, 1).failures.is_empty());
}

#[test]
fn cycle_placement_splits_gates() {
    let logical = qaoa_ring(4, 0.6, 0.3);
    let (enc, meta) = build_iceberg_circuit(&logical, 2).unwrap();
    let syndrome = enc
        .creg_offset(meta.syndrome_register.as_deref().unwrap())
        .unwrap();
    assert_eq!(syndrome.1, 4);
    // The last syndrome measurement comes after the last logical gate.
    let last_gate = enc
        .instructions
        .iter()
        .rposition(|i| i.angle().is_some())
        .unwrap();
    let last_syndrome = enc
        .instructions
        .iter()
        .rposition(|i| {
            i.clbits
                .first()
                .is_some_and(|&c| c >= syndrome.0 && c < syndrome.0 + syndrome.1)
        })
        .unwrap();
    assert!(last_syndrome > last_gate);
}
