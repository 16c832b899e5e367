//! Pauli-frame propagation: tracks how a Pauli fault changes measurement
//! records relative to the ideal run.

use crate::circuit::{Circuit, GateKind};
use crate::clifford::{clifford_decomposition, CliffordGate};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameOutcome {
    /// Classical bits whose recorded value differs from the fault-free run.
    pub flipped: Vec<bool>,
    /// Frame left on the qubits after the last instruction.
    pub frame: PauliString,
    /// True when the frame anticommuted with a non-Clifford rotation and was
    /// passed through unchanged.
    pub crossed_non_clifford: bool,
}

/// Precomputed Clifford expansions so many faults can be propagated cheaply.
pub struct FramePropagator<'a> {
    circ: &'a Circuit,
    programs: Vec<Option<Vec<CliffordGate>>>,
}

impl<'a> FramePropagator<'a> {
    pub fn new(circ: &'a Circuit) -> Self {
        let programs = circ
            .instructions
            .iter()
            .map(|inst| {
                if inst.is_unitary() {
                    clifford_decomposition(inst)
                } else {
                    Some(Vec::new())
                }
            })
            .collect();
        FramePropagator { circ, programs }
    }

    /// Propagates `fault` inserted just before instruction `start` to the end of the circuit.
    pub fn propagate(&self, start: usize, fault: &PauliString) -> FrameOutcome {
        let mut frame = fault.clone();
        let mut flipped = vec![false; self.circ.num_clbits()];
        let mut crossed = false;
        for (inst, program) in self.circ.instructions[start..]
            .iter()
            .zip(&self.programs[start..])
        {
            match inst.kind() {
                GateKind::Measure => {
                    let q = inst.qubits[0];
                    flipped[inst.clbits[0]] = frame.x_bit(q);
                    let keep_x = if frame.x_bit(q) { Pauli::X } else { Pauli::I };
                    frame.set(q, keep_x);
                }
                GateKind::Reset => frame.set(inst.qubits[0], Pauli::I),
                GateKind::Barrier => {}
                _ => match program {
                    Some(gates) => gates.iter().for_each(|g| g.conjugate(&mut frame)),
                    None => {
                        if !frame.commutes_with(&rotation_generator(frame.num_qubits(), inst)) {
                            crossed = true;
                        }
                    }
                },
            }
        }
        FrameOutcome {
            flipped,
            frame,
            crossed_non_clifford: crossed,
        }
    }
}

/// The Pauli `P` of a rotation `exp(-iθP/2)` (T and Tdg count as Z rotations).
fn rotation_generator(n: usize, inst: &crate::circuit::Instruction) -> PauliString {
    let letter = match inst.kind() {
        GateKind::Rz | GateKind::Rzz | GateKind::T | GateKind::Tdg => Pauli::Z,
        GateKind::Rx | GateKind::Rxx => Pauli::X,
        GateKind::Ry | GateKind::Ryy => Pauli::Y,
        other => unreachable!("{other} is always Clifford"),
    };
    let factors: Vec<(usize, Pauli)> = inst.qubits.iter().map(|&q| (q, letter)).collect();
    PauliString::from_factors(n, &factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_before_cx_flips_both_measurements() {
        let mut c = Circuit::new(2, 2);
        c.cx(0, 1).measure(0, 0).measure(1, 1);
        let out = FramePropagator::new(&c).propagate(0, &"IX".parse().unwrap());
        assert_eq!(out.flipped, vec![true, true]);
        assert!(!out.crossed_non_clifford);
    }

    #[test]
    fn reset_clears_fault() {
        let mut c = Circuit::new(1, 1);
        c.reset(0).measure(0, 0);
        let out = FramePropagator::new(&c).propagate(0, &"X".parse().unwrap());
        assert_eq!(out.flipped, vec![false]);
    }

    #[test]
    fn non_clifford_rotation_is_flagged() {
        let mut c = Circuit::new(1, 1);
        c.rz(0.3, 0).measure(0, 0);
        let out = FramePropagator::new(&c).propagate(0, &"X".parse().unwrap());
        assert!(out.crossed_non_clifford);
        assert_eq!(out.flipped, vec![true]);
        let out = FramePropagator::new(&c).propagate(0, &"Z".parse().unwrap());
        assert!(!out.crossed_non_clifford);
        assert_eq!(out.flipped, vec![false]);
    }
}
