//! First-order keep-rate prediction from Pauli-frame propagation.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Register};
use crate::iceberg::IcebergMeta;
use crate::pauli::{Pauli, PauliString};
use crate::pcs::PcsMeta;
use crate::sim::frame::FramePropagator;
use crate::sim::NoiseModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadEstimate {
    /// `Π (1 − p_g · c_g)` over noisy locations.
    pub keep_rate: f64,
    pub noisy_locations: usize,
    /// Set when some fault crossed a non-Clifford rotation that it
    /// anticommutes with and the code's detection can depend on it.
    pub approximate: bool,
    /// `(instruction index, detected fraction c_g)` for every noisy location.
    pub detected_fraction: Vec<(usize, f64)>,
}

/// Which measurement flips count as a detection.
#[derive(Clone, Debug)]
pub enum DetectionRule {
    /// Any listed clbit flips.
    AnyFlip { bits: Vec<usize> },
    /// Any of `flags` flips, or the parity over `parity` flips.
    FlagsOrParity {
        flags: Vec<usize>,
        parity: Vec<usize>,
    },
}

impl DetectionRule {
    pub fn for_pcs(meta: &PcsMeta) -> Self {
        DetectionRule::AnyFlip {
            bits: meta.ancilla_register.bits.clone(),
        }
    }

    pub fn for_iceberg(meta: &IcebergMeta) -> Self {
        let range = |name: &str| -> Vec<usize> {
            let mut off = 0;
            for Register { name: n, size } in &meta.cregs {
                if n == name {
                    return (off..off + size).collect();
                }
                off += size;
            }
            Vec::new()
        };
        let mut flags = range(&meta.verify_register);
        if let Some(s) = &meta.syndrome_register {
            flags.extend(range(s));
        }
        DetectionRule::FlagsOrParity {
            flags,
            parity: range(&meta.readout_register),
        }
    }

    fn detects(&self, flipped: &[bool]) -> bool {
        match self {
            DetectionRule::AnyFlip { bits } => bits.iter().any(|&b| flipped[b]),
            DetectionRule::FlagsOrParity { flags, parity } => {
                flags.iter().any(|&b| flipped[b])
                    || parity.iter().filter(|&&b| flipped[b]).count() % 2 == 1
            }
        }
    }
}

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Predicts the keep rate of `circ` under `noise`. `exact_through_rotations`
/// states that detection is insensitive to the sign flips a fault causes on
/// non-Clifford rotations it anticommutes with (true for Iceberg, whose
/// rotations are logical operators).
pub fn estimate_overhead(
    circ: &Circuit,
    rule: &DetectionRule,
    noise: &NoiseModel,
    exact_through_rotations: bool,
) -> OverheadEstimate {
    let n = circ.num_qubits();
    let prop = FramePropagator::new(circ);
    let mut keep = 1.0;
    let mut approximate = false;
    let mut fractions = Vec::new();
    for (index, inst) in circ.instructions.iter().enumerate() {
        let p = noise.error_rate(inst);
        if p == 0.0 {
            continue;
        }
        let choices = (1usize << (2 * inst.qubits.len())) - 1;
        let mut detected = 0usize;
        for code in 1..=choices {
            let factors: Vec<(usize, Pauli)> = inst
                .qubits
                .iter()
                .enumerate()
                .map(|(j, &q)| (q, LETTERS[(code >> (2 * j)) & 3]))
                .collect();
            let out = prop.propagate(index + 1, &PauliString::from_factors(n, &factors));
            approximate |= out.crossed_non_clifford && !exact_through_rotations;
            if rule.detects(&out.flipped) {
                detected += 1;
            }
        }
        let c = detected as f64 / choices as f64;
        keep *= 1.0 - p * c;
        fractions.push((index, c));
    }
    OverheadEstimate {
        keep_rate: keep,
        noisy_locations: fractions.len(),
        approximate,
        detected_fraction: fractions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Region;
    use crate::pcs::{insert_pcs, Payload};

    #[test]
    fn single_cx_with_xx_check() {
        let mut c = Circuit::new(2, 2);
        c.cx(0, 1);
        let region = Region::from_range(&c, 0, 1);
        let payload = Payload::new(&c, &region).unwrap();
        let check = payload.check_for(&"IX".parse().unwrap(), 2);
        assert_eq!(check.right.to_string(), "+XX");
        let (out, meta) = insert_pcs(&c, &region, &[check]).unwrap();
        let payload_cx = (0..out.instructions.len())
            .find(|i| !meta.inserted.contains(i))
            .unwrap();
        let noise = NoiseModel {
            p1: 0.0,
            p2: 0.002,
            gates1: vec![],
            gates2: vec![crate::GateKind::Cx],
        };
        let est = estimate_overhead(&out, &DetectionRule::for_pcs(&meta), &noise, false);
        let (_, cg) = est
            .detected_fraction
            .iter()
            .find(|(i, _)| *i == payload_cx)
            .copied()
            .unwrap();
        assert!((cg - 8.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn noiseless_keeps_everything() {
        let (c, meta) = crate::iceberg::build_iceberg_circuit(&Circuit::new(2, 0), 1).unwrap();
        let est = estimate_overhead(
            &c,
            &DetectionRule::for_iceberg(&meta),
            &NoiseModel::noiseless(),
            true,
        );
        assert_eq!(est.keep_rate, 1.0);
    }

    #[test]
    fn monotone_in_p2() {
        let (c, meta) = crate::iceberg::build_iceberg_circuit(&Circuit::new(2, 0), 1).unwrap();
        let rule = DetectionRule::for_iceberg(&meta);
        let lo =
            estimate_overhead(&c, &rule, &NoiseModel::depolarizing(3e-5, 0.001), true).keep_rate;
        let hi =
            estimate_overhead(&c, &rule, &NoiseModel::depolarizing(3e-5, 0.002), true).keep_rate;
        assert!(hi <= lo && lo < 1.0);
    }
}
