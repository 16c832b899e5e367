mod common;

use std::collections::BTreeMap;

use common::*;
use qedc::analysis::{largest_clifford_region, transpile_to_gateset, GateSet, Region};
use qedc::pcs::{
    convert_to_pcs_largest_clifford, insert_pcs, strip_pcs, synthesize_checks, Payload, PcsError,
    PcsMeta, Strategy,
};
use qedc::postprocess::{postselect_counts, tvd};
use qedc::sim::{exact_distribution, sample, stabilizer_run, Injection, NoiseModel};
use qedc::{Circuit, GateKind, PauliString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact postselected distribution: keeps keys whose ancilla group matches and strips it.
fn postselect_exact(dist: &BTreeMap<String, f64>, meta: &PcsMeta) -> (f64, BTreeMap<String, f64>) {
    let groups: Vec<&str> = meta
        .cregs
        .iter()
        .filter(|r| r.size > 0)
        .rev()
        .map(|r| r.name.as_str())
        .collect();
    let pos = groups
        .iter()
        .position(|&g| g == meta.ancilla_register.name)
        .unwrap();
    let mut kept = BTreeMap::new();
    let mut mass = 0.0;
    for (key, &p) in dist {
        let mut parts: Vec<&str> = key.split(' ').collect();
        if parts.remove(pos) == meta.expected_ancilla_bits {
            mass += p;
            *kept.entry(parts.join(" ")).or_insert(0.0) += p;
        }
    }
    for v in kept.values_mut() {
        *v /= mass;
    }
    (mass, kept)
}

#[test]
fn noiseless_postselection_preserves_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..40 {
        let circ = random_circuit_with_clifford_region(&mut rng, 4, 3);
        let checks = rng.gen_range(1..=3);
        let strategy = if case % 2 == 0 {
            Strategy::GreedyCoverage
        } else {
            Strategy::RandomZ
        };
        let (pcs, meta) = convert_to_pcs_largest_clifford(&circ, checks, strategy, case).unwrap();
        let (mass, post) = postselect_exact(&exact_distribution(&pcs).unwrap(), &meta);
        assert!((mass - 1.0).abs() < 1e-9, "case {case}: keep mass {mass}");
        let ideal = exact_distribution(&circ).unwrap();
        assert!(tvd(&post, &ideal) < 1e-9, "case {case}");
    }
}

#[test]
fn negative_sign_expects_one() {
    let mut c = Circuit::new(1, 1);
    c.s(0).measure(0, 0);
    let region = Region::from_range(&c, 0, 1);
    let payload = Payload::new(&c, &region).unwrap();
    let check = payload.check_for(&"Y".parse().unwrap(), 1);
    let (pcs, meta) = insert_pcs(&c, &region, &[check]).unwrap();
    assert_eq!(meta.expected_ancilla_bits, "1");
    let counts = sample(&pcs, &NoiseModel::noiseless(), 500, 3).unwrap();
    let report = postselect_counts(&counts, &meta).unwrap();
    assert_eq!(report.kept, 500);
    assert_eq!(report.counts, BTreeMap::from([("0".to_string(), 500)]));
}

#[test]
fn nesting_order_and_early_measurement() {
    let mut c = Circuit::new(2, 0);
    c.h(0).cx(0, 1);
    let region = Region::from_range(&c, 0, 2);
    let payload = Payload::new(&c, &region).unwrap();
    let checks = vec![
        payload.check_for(&"IZ".parse().unwrap(), 2),
        payload.check_for(&"ZI".parse().unwrap(), 3),
    ];
    let (pcs, _) = insert_pcs(&c, &region, &checks).unwrap();
    let first_touch = |q: usize| {
        pcs.instructions
            .iter()
            .position(|i| i.qubits.contains(&q))
            .unwrap()
    };
    let measure_of = |q: usize| {
        pcs.instructions
            .iter()
            .position(|i| i.kind() == GateKind::Measure && i.qubits[0] == q)
            .unwrap()
    };
    // L_2 is applied before L_1, and R_1 is measured before R_2 starts.
    assert!(first_touch(3) < first_touch(2));
    assert!(measure_of(2) < measure_of(3));
    let r2_start = pcs
        .instructions
        .iter()
        .enumerate()
        .skip(measure_of(2))
        .find(|(_, i)| i.qubits.contains(&3))
        .unwrap()
        .0;
    assert!(measure_of(2) < r2_start);
}

#[test]
fn strip_restores_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..10 {
        let circ = random_circuit_with_clifford_region(&mut rng, 4, 3);
        let native = transpile_to_gateset(&circ, GateSet::PcsDefault).unwrap();
        let (pcs, meta) =
            convert_to_pcs_largest_clifford(&circ, 2, Strategy::GreedyCoverage, seed).unwrap();
        assert_eq!(strip_pcs(&pcs, &meta), native);
    }
}

#[test]
fn random_z_checks_are_z_type() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let circ = random_clifford_circuit(&mut rng, 4, 12);
    let region = largest_clifford_region(&circ).unwrap();
    let payload = Payload::new(&circ, &region).unwrap();
    let checks = synthesize_checks(&payload, &circ, 3, Strategy::RandomZ, 17).unwrap();
    assert_eq!(checks.len(), 3);
    for c in &checks {
        assert!(c.left.is_z_type() && !c.left.is_identity() && c.left.weight() <= 2);
    }
    let again = synthesize_checks(&payload, &circ, 3, Strategy::RandomZ, 17).unwrap();
    assert_eq!(checks, again);
}

#[test]
fn too_many_checks_rejected() {
    let mut c = Circuit::new(1, 0);
    c.h(0);
    let region = Region::from_range(&c, 0, 1);
    let payload = Payload::new(&c, &region).unwrap();
    let err = synthesize_checks(&payload, &c, 4, Strategy::GreedyCoverage, 0).unwrap_err();
    assert!(matches!(
        err,
        PcsError::TooManyChecks {
            requested: 4,
            available: 3
        }
    ));
}

#[test]
fn forged_check_rejected() {
    let mut c = Circuit::new(2, 0);
    c.cx(0, 1);
    let region = Region::from_range(&c, 0, 1);
    let payload = Payload::new(&c, &region).unwrap();
    let mut check = payload.check_for(&"IX".parse().unwrap(), 2);
    check.right = "+IX".parse().unwrap();
    assert!(matches!(
        insert_pcs(&c, &region, &[check]),
        Err(PcsError::InvalidCheck { index: 0 })
    ));
}

/// A Pauli injected right after the payload flips ancilla `i` exactly when
/// it anticommutes with right check `i`.
#[test]
fn payload_faults_flip_anticommuting_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..10 {
        let circ = random_clifford_circuit(&mut rng, 3, 10);
        let (pcs, meta) =
            convert_to_pcs_largest_clifford(&circ, 2, Strategy::GreedyCoverage, 0).unwrap();
        let after_payload = pcs
            .instructions
            .iter()
            .enumerate()
            .find(|(i, _)| {
                meta.inserted.contains(i) && *i > meta.inserted[0] && {
                    // first inserted instruction after the payload block
                    !meta.inserted.contains(&(i - 1))
                }
            })
            .map(|(i, _)| i)
            .unwrap_or(pcs.instructions.len());
        for code in 1..64u32 {
            let letters: String = (0..3)
                .rev()
                .map(|q| ['I', 'X', 'Y', 'Z'][((code >> (2 * q)) & 3) as usize])
                .collect();
            let fault: PauliString = format!("II{letters}").parse().unwrap();
            let run = stabilizer_run(
                &pcs,
                Some(&Injection {
                    before: after_payload,
                    pauli: fault.clone(),
                }),
                &mut rng,
            )
            .unwrap();
            for (i, check) in meta.checks.iter().enumerate() {
                let right = PauliString::from_factors(
                    5,
                    &(0..3).map(|q| (q, check.right.get(q))).collect::<Vec<_>>(),
                );
                let flipped = run.clbits[meta.ancilla_register.bits[i]] != check.expected_bit();
                assert_eq!(
                    flipped,
                    !fault.commutes_with(&right),
                    "fault {fault} vs {}",
                    check.right
                );
            }
        }
    }
}
