mod common;

use common::*;
use proptest::prelude::*;
use qedc::clifford::CliffordTableau;
use qedc::pauli::all_paulis;
use qedc::sim::unitary;
use qedc::{Pauli, PauliString, Phase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn conjugation_matches_dense_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..60 {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(1..20);
        let circ = random_clifford_circuit(&mut rng, n, len);
        let tab = CliffordTableau::from_instructions(n, &circ.instructions).unwrap();
        assert!(tab.is_symplectic());
        let u = from_columns(&unitary(&circ).unwrap());
        let ud = dagger(&u);
        for l in all_paulis(n) {
            let expect = matmul(&matmul(&u, &pauli_matrix(&l)), &ud);
            let got = pauli_matrix(&tab.conjugate(&l).unwrap());
            assert!(
                max_abs_diff(&expect, &got) < 1e-9,
                "case {case}: {l} through {:?}",
                circ.instructions
            );
        }
    }
}

#[test]
fn then_composes_in_time_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let a = random_clifford_circuit(&mut rng, 3, 8);
        let b = random_clifford_circuit(&mut rng, 3, 8);
        let mut ab = a.clone();
        ab.instructions.extend(b.instructions.iter().cloned());
        let ta = CliffordTableau::from_instructions(3, &a.instructions).unwrap();
        let tb = CliffordTableau::from_instructions(3, &b.instructions).unwrap();
        let tab = CliffordTableau::from_instructions(3, &ab.instructions).unwrap();
        assert_eq!(ta.then(&tb).unwrap(), tab);
    }
}

fn letter() -> impl Strategy<Value = Pauli> {
    prop_oneof![
        Just(Pauli::I),
        Just(Pauli::X),
        Just(Pauli::Y),
        Just(Pauli::Z)
    ]
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(letter(), n), 0u32..4).prop_map(move |(letters, k)| {
        let factors: Vec<(usize, Pauli)> = letters.into_iter().enumerate().collect();
        PauliString::from_factors(n, &factors).with_phase(Phase::from_exponent(k))
    })
}

proptest! {
    #[test]
    fn product_matches_matrix_product(a in pauli_string(3), b in pauli_string(3)) {
        let prod = a.mul(&b).unwrap();
        let dense = matmul(&pauli_matrix(&a), &pauli_matrix(&b));
        prop_assert!(max_abs_diff(&dense, &pauli_matrix(&prod)) < 1e-12);
    }

    #[test]
    fn commutation_matches_matrices(a in pauli_string(3), b in pauli_string(3)) {
        let ab = matmul(&pauli_matrix(&a), &pauli_matrix(&b));
        let ba = matmul(&pauli_matrix(&b), &pauli_matrix(&a));
        prop_assert_eq!(a.commutes_with(&b), max_abs_diff(&ab, &ba) < 1e-12);
    }

    #[test]
    fn text_round_trip(p in pauli_string(5)) {
        let back: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn signed_permutation_check_agrees_with_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let circ = random_clifford_circuit(&mut rng, 3, 12);
        let tab = CliffordTableau::from_instructions(3, &circ.instructions).unwrap();
        let cols = unitary(&circ).unwrap();
        for l in all_paulis(3) {
            let image = tab.conjugate(&l).unwrap();
            assert!(conjugation_defect(&cols, &l, &image) < 1e-9);
            // A wrong sign must be caught.
            let mut flipped = image.clone();
            flipped.negate();
            assert!(conjugation_defect(&cols, &l, &flipped) > 0.5);
        }
    }
}
