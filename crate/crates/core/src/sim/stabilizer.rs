//! Stabilizer-tableau simulation with destabilizers, after Aaronson and Gottesman.

use rand::Rng;

use super::{SimError, MAX_STABILIZER_QUBITS};
use crate::circuit::{Circuit, GateKind};
use crate::clifford::{clifford_decomposition, CliffordGate};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    destab: Vec<PauliString>,
    stab: Vec<PauliString>,
}

/// Result of a single-qubit Z measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub value: bool,
    pub deterministic: bool,
}

impl StabilizerState {
    /// The state `|0…0⟩`.
    pub fn new(n: usize) -> Self {
        StabilizerState {
            n,
            destab: (0..n)
                .map(|q| PauliString::single(n, q, Pauli::X))
                .collect(),
            stab: (0..n)
                .map(|q| PauliString::single(n, q, Pauli::Z))
                .collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stab
    }

    pub fn apply(&mut self, gate: CliffordGate) {
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            gate.conjugate(row);
        }
    }

    /// Applies a Pauli operator to the state: rows anticommuting with it change sign.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            if !row.commutes_with(p) {
                row.negate();
            }
        }
    }

    /// Measures `Z_q`; `coin` supplies the outcome when it is not determined.
    pub fn measure(&mut self, q: usize, coin: impl FnOnce() -> bool) -> Outcome {
        let n = self.n;
        if let Some(p) = (0..n).find(|&i| self.stab[i].x_bit(q)) {
            let pivot = self.stab[p].clone();
            for i in 0..n {
                if i != p && self.stab[i].x_bit(q) {
                    self.stab[i].mul_assign(&pivot);
                }
                if i != p && self.destab[i].x_bit(q) {
                    self.destab[i].mul_assign(&pivot);
                }
            }
            let value = coin();
            self.destab[p] = pivot;
            let mut z = PauliString::single(n, q, Pauli::Z);
            if value {
                z.negate();
            }
            self.stab[p] = z;
            Outcome {
                value,
                deterministic: false,
            }
        } else {
            let mut scratch = PauliString::identity(n);
            for i in 0..n {
                if self.destab[i].x_bit(q) {
                    scratch.mul_assign(&self.stab[i]);
                }
            }
            Outcome {
                value: scratch.sign() == Some(-1),
                deterministic: true,
            }
        }
    }

    /// Measures and flips back to `|0⟩`.
    pub fn reset(&mut self, q: usize, coin: impl FnOnce() -> bool) {
        if self.measure(q, coin).value {
            self.apply(CliffordGate::X(q));
        }
    }

    /// `Some(±1)` when `±p` belongs to the stabilizer group, `None` when a
    /// measurement of `p` would be random.
    pub fn expectation_sign(&self, p: &PauliString) -> Option<i8> {
        if self.stab.iter().any(|s| !s.commutes_with(p)) {
            return None;
        }
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if !self.destab[i].commutes_with(p) {
                acc.mul_assign(&self.stab[i]);
            }
        }
        let mut unsigned_acc = acc.clone();
        unsigned_acc.set_phase(p.phase());
        if &unsigned_acc != p {
            return None;
        }
        let s = acc.sign()?;
        let ps = p.sign()?;
        Some(s * ps)
    }
}

/// A Pauli applied just before instruction `before` (use the instruction count
/// for "after the last instruction").
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Injection {
    pub before: usize,
    pub pauli: PauliString,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub instruction: usize,
    pub qubit: usize,
    pub clbit: Option<usize>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug)]
pub struct StabilizerRun {
    pub measurements: Vec<MeasurementRecord>,
    pub clbits: Vec<bool>,
    pub state: StabilizerState,
}

/// Runs a Clifford circuit on the stabilizer engine, applying the optional
/// injected Pauli at its instruction boundary. Random outcomes are drawn from `rng`.
pub fn stabilizer_run<R: Rng + ?Sized>(
    circ: &Circuit,
    injected: Option<&Injection>,
    rng: &mut R,
) -> Result<StabilizerRun, SimError> {
    let injections: Vec<Injection> = injected.cloned().into_iter().collect();
    run_with_injections(circ, &injections, rng)
}

/// Like [`stabilizer_run`] with any number of injections (sorted or not).
pub fn run_with_injections<R: Rng + ?Sized>(
    circ: &Circuit,
    injections: &[Injection],
    rng: &mut R,
) -> Result<StabilizerRun, SimError> {
    let n = circ.num_qubits();
    if n > MAX_STABILIZER_QUBITS {
        return Err(SimError::TooManyQubits {
            n,
            max: MAX_STABILIZER_QUBITS,
        });
    }
    let programs = compile(circ)?;
    let mut state = StabilizerState::new(n);
    let mut clbits = vec![false; circ.num_clbits()];
    let mut measurements = Vec::new();
    let inject = |state: &mut StabilizerState, at: usize| {
        for inj in injections.iter().filter(|i| i.before == at) {
            state.apply_pauli(&inj.pauli);
        }
    };
    for (index, (inst, gates)) in circ.instructions.iter().zip(&programs).enumerate() {
        inject(&mut state, index);
        match inst.kind() {
            GateKind::Measure => {
                let q = inst.qubits[0];
                let outcome = state.measure(q, || rng.gen());
                clbits[inst.clbits[0]] = outcome.value;
                measurements.push(MeasurementRecord {
                    instruction: index,
                    qubit: q,
                    clbit: Some(inst.clbits[0]),
                    outcome,
                });
            }
            GateKind::Reset => state.reset(inst.qubits[0], || rng.gen()),
            GateKind::Barrier => {}
            _ => {
                for &g in gates {
                    state.apply(g);
                }
            }
        }
    }
    inject(&mut state, circ.instructions.len());
    Ok(StabilizerRun {
        measurements,
        clbits,
        state,
    })
}

/// Clifford expansion of every instruction (empty for measure/reset/barrier).
pub(crate) fn compile(circ: &Circuit) -> Result<Vec<Vec<CliffordGate>>, SimError> {
    circ.instructions
        .iter()
        .enumerate()
        .map(|(index, inst)| match inst.kind() {
            GateKind::Measure | GateKind::Reset | GateKind::Barrier => Ok(Vec::new()),
            _ => clifford_decomposition(inst).ok_or(SimError::NonClifford {
                index,
                gate: inst.kind(),
            }),
        })
        .collect()
}

/// Canonical form of the subgroup of Z-type stabilizers supported on `qubits`.
///
/// Two stabilizer states yield the same Z-basis outcome distribution on
/// `qubits` exactly when these canonical forms agree.
pub fn z_marginal_signature(state: &StabilizerState, qubits: &[usize]) -> Vec<PauliString> {
    let n = state.n;
    let inside: Vec<bool> = (0..n).map(|q| qubits.contains(&q)).collect();
    // Column order: every x column, then z outside `qubits`, then z inside.
    let mut columns: Vec<(bool, usize)> = (0..n).map(|q| (true, q)).collect();
    columns.extend((0..n).filter(|&q| !inside[q]).map(|q| (false, q)));
    let inner_start = columns.len();
    columns.extend(qubits.iter().map(|&q| (false, q)));
    let bit =
        |p: &PauliString, (is_x, q): (bool, usize)| if is_x { p.x_bit(q) } else { p.z_bit(q) };

    let mut rows: Vec<PauliString> = state.stab.clone();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for (ci, &col) in columns.iter().enumerate() {
        let Some(r) = (pivot_row..rows.len()).find(|&r| bit(&rows[r], col)) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && bit(row, col) {
                row.mul_assign(&pivot);
            }
        }
        pivots.push(ci);
        pivot_row += 1;
    }
    rows.into_iter()
        .zip(pivots)
        .filter(|&(_, ci)| ci >= inner_start)
        .map(|(row, _)| row)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bell_outcomes_correlated() {
        let mut c = Circuit::new(2, 2);
        c.h(0).cx(0, 1).measure(0, 0).measure(1, 1);
        for seed in 0..20 {
            let run = stabilizer_run(&c, None, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!(!run.measurements[0].outcome.deterministic);
            assert!(run.measurements[1].outcome.deterministic);
            assert_eq!(run.clbits[0], run.clbits[1]);
        }
    }

    #[test]
    fn injected_x_flips_deterministic_outcome() {
        let mut c = Circuit::new(2, 1);
        c.cx(0, 1).measure(1, 0);
        let inj = Injection {
            before: 0,
            pauli: "IX".parse().unwrap(),
        };
        let run = stabilizer_run(&c, Some(&inj), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(
            run.measurements[0].outcome,
            Outcome {
                value: true,
                deterministic: true
            }
        );
    }

    #[test]
    fn non_clifford_rejected() {
        let mut c = Circuit::new(1, 0);
        c.t(0);
        assert!(matches!(
            stabilizer_run(&c, None, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(SimError::NonClifford { index: 0, .. })
        ));
    }

    #[test]
    fn expectation_signs() {
        let mut s = StabilizerState::new(2);
        s.apply(CliffordGate::H(0));
        s.apply(CliffordGate::Cx(0, 1));
        assert_eq!(s.expectation_sign(&"ZZ".parse().unwrap()), Some(1));
        assert_eq!(s.expectation_sign(&"XX".parse().unwrap()), Some(1));
        assert_eq!(s.expectation_sign(&"YY".parse().unwrap()), Some(-1));
        assert_eq!(s.expectation_sign(&"ZI".parse().unwrap()), None);
        assert_eq!(s.expectation_sign(&"-ZZ".parse().unwrap()), Some(-1));
    }

    #[test]
    fn z_signature_ignores_phases() {
        let mut a = StabilizerState::new(2);
        a.apply(CliffordGate::H(0));
        a.apply(CliffordGate::Cx(0, 1));
        let mut b = a.clone();
        b.apply(CliffordGate::Z(0));
        assert_ne!(a, b);
        assert_eq!(
            z_marginal_signature(&a, &[0, 1]),
            z_marginal_signature(&b, &[0, 1])
        );
        let mut c = a.clone();
        c.apply(CliffordGate::X(0));
        assert_ne!(
            z_marginal_signature(&a, &[0, 1]),
            z_marginal_signature(&c, &[0, 1])
        );
    }
}
