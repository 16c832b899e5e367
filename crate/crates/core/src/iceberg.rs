//! The `[[k+2, k, 2]]` Iceberg code.
//!
//! Data qubits are ordered `[t, 1..k, b]` with logical operators
//! `X̄_i = X_t X_i` and `Z̄_i = Z_i Z_b`; the stabilizers are `X^{⊗n}` and
//! `Z^{⊗n}`. Two extra ancillas measure both stabilizers in each syndrome
//! cycle and are reset for reuse.

use serde::{Deserialize, Serialize};

use crate::analysis::{transpile_to_gateset, GateSet, UnsupportedGate};
use crate::circuit::{Circuit, GateKind, Instruction, Register};

pub const ACCEPT_RULE: &str = "cycles_zero_and_even_parity";

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum IcebergError {
    #[error("the Iceberg code needs an even, positive number of logical qubits (got {0})")]
    OddQubitCount(usize),
    #[error(transparent)]
    Unsupported(#[from] UnsupportedGate),
    #[error("logical gate {0} is not one of rz, rx, rzz, rxx")]
    UnsupportedLogical(GateKind),
    #[error("readout has {got} bits, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcebergLayout {
    pub k: usize,
    /// `[t, 1..k, b]`.
    pub data_qubits: Vec<usize>,
    pub ancillas: [usize; 2],
    pub cycles: usize,
}

impl IcebergLayout {
    pub fn new(k: usize, cycles: usize) -> Result<Self, IcebergError> {
        if k == 0 || k % 2 == 1 {
            return Err(IcebergError::OddQubitCount(k));
        }
        let n = k + 2;
        Ok(IcebergLayout {
            k,
            data_qubits: (0..n).collect(),
            ancillas: [n, n + 1],
            cycles,
        })
    }

    pub fn n(&self) -> usize {
        self.k + 2
    }

    pub fn top(&self) -> usize {
        self.data_qubits[0]
    }

    pub fn bottom(&self) -> usize {
        self.data_qubits[self.k + 1]
    }

    pub fn logical(&self, i: usize) -> usize {
        self.data_qubits[1 + i]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcebergMeta {
    pub k: usize,
    pub data_qubits: Vec<usize>,
    pub ancillas: [usize; 2],
    pub cycles: usize,
    pub accept_rule: String,
    pub verify_register: String,
    /// Absent when `cycles == 0`.
    pub syndrome_register: Option<String>,
    pub readout_register: String,
    pub cregs: Vec<Register>,
}

impl IcebergMeta {
    pub fn layout(&self) -> IcebergLayout {
        IcebergLayout {
            k: self.k,
            data_qubits: self.data_qubits.clone(),
            ancillas: self.ancillas,
            cycles: self.cycles,
        }
    }
}

const VERIFY: &str = "verify";
const SYNDROME: &str = "syndrome";
const READOUT: &str = "readout";

/// Prepares logical `|0…0⟩` and checks `Z_t Z_b` on ancilla 0 into `verify_bit`.
pub fn iceberg_encode_init(layout: &IcebergLayout, verify_bit: usize) -> Vec<Instruction> {
    let mut out = Vec::new();
    let d = &layout.data_qubits;
    out.push(Instruction::new(GateKind::H, &[d[0]]));
    for w in d.windows(2) {
        out.push(Instruction::new(GateKind::Cx, &[w[0], w[1]]));
    }
    let a = layout.ancillas[0];
    out.push(Instruction::new(GateKind::Cx, &[layout.top(), a]));
    out.push(Instruction::new(GateKind::Cx, &[layout.bottom(), a]));
    out.push(Instruction::measure(a, verify_bit));
    out.push(Instruction::new(GateKind::Reset, &[a]));
    out
}

/// Physical realization of one logical gate.
pub fn map_logical_gate(
    inst: &Instruction,
    layout: &IcebergLayout,
) -> Result<Vec<Instruction>, IcebergError> {
    let theta = || inst.angle().expect("rotation angle");
    let q = &inst.qubits;
    let phys = match inst.kind() {
        GateKind::Rz => Instruction::rotation(
            GateKind::Rzz,
            theta(),
            &[layout.logical(q[0]), layout.bottom()],
        ),
        GateKind::Rx => Instruction::rotation(
            GateKind::Rxx,
            theta(),
            &[layout.top(), layout.logical(q[0])],
        ),
        kind @ (GateKind::Rzz | GateKind::Rxx) => {
            Instruction::rotation(kind, theta(), &[layout.logical(q[0]), layout.logical(q[1])])
        }
        other => return Err(IcebergError::UnsupportedLogical(other)),
    };
    Ok(vec![phys])
}

/// Measures `Z^{⊗n}` into `bits.0` and `X^{⊗n}` into `bits.1`, then resets both ancillas.
pub fn syndrome_cycle(layout: &IcebergLayout, bits: (usize, usize)) -> Vec<Instruction> {
    let [az, ax] = layout.ancillas;
    let mut out = Vec::new();
    for &d in &layout.data_qubits {
        out.push(Instruction::new(GateKind::Cx, &[d, az]));
    }
    out.push(Instruction::new(GateKind::H, &[ax]));
    for &d in &layout.data_qubits {
        out.push(Instruction::new(GateKind::Cx, &[ax, d]));
    }
    out.push(Instruction::new(GateKind::H, &[ax]));
    out.push(Instruction::measure(az, bits.0));
    out.push(Instruction::measure(ax, bits.1));
    out.push(Instruction::new(GateKind::Reset, &[az]));
    out.push(Instruction::new(GateKind::Reset, &[ax]));
    out
}

/// Encodes `circ` without the final readout measurements (the readout
/// register is still declared). Cycle `j` (1-based) follows logical gate
/// `round(j·G/cycles)`, so the last cycle always follows the last gate.
pub fn build_iceberg_unmeasured(
    circ: &Circuit,
    cycles: usize,
) -> Result<(Circuit, IcebergMeta), IcebergError> {
    let k = circ.num_qubits();
    let layout = IcebergLayout::new(k, cycles)?;
    let logical = transpile_to_gateset(circ, GateSet::IcebergLogical)?;
    let gates: Vec<&Instruction> = logical
        .instructions
        .iter()
        .filter(|i| !matches!(i.kind(), GateKind::Measure | GateKind::Barrier))
        .collect();
    let n = layout.n();

    let mut out = Circuit::default();
    out.add_qreg("data", n);
    out.add_qreg("syn", 2);
    let verify = out.add_creg(VERIFY, 1);
    let syndrome = (cycles > 0).then(|| out.add_creg(SYNDROME, 2 * cycles));
    out.add_creg(READOUT, n);

    out.instructions
        .extend(iceberg_encode_init(&layout, verify));
    let g = gates.len();
    let boundaries: Vec<usize> = (1..=cycles)
        .map(|j| ((j * g) as f64 / cycles as f64).round() as usize)
        .collect();
    let mut next_cycle = 0;
    let mut emit_cycles_at = |pos: usize, out: &mut Circuit| {
        while next_cycle < cycles && boundaries[next_cycle] == pos {
            let base = syndrome.expect("syndrome register") + 2 * next_cycle;
            out.instructions
                .extend(syndrome_cycle(&layout, (base, base + 1)));
            next_cycle += 1;
        }
    };
    emit_cycles_at(0, &mut out);
    for (i, inst) in gates.iter().enumerate() {
        out.instructions.extend(map_logical_gate(inst, &layout)?);
        emit_cycles_at(i + 1, &mut out);
    }

    let meta = IcebergMeta {
        k,
        data_qubits: layout.data_qubits.clone(),
        ancillas: layout.ancillas,
        cycles,
        accept_rule: ACCEPT_RULE.to_string(),
        verify_register: VERIFY.to_string(),
        syndrome_register: syndrome.map(|_| SYNDROME.to_string()),
        readout_register: READOUT.to_string(),
        cregs: out.cregs.clone(),
    };
    Ok((out, meta))
}

/// Full encoded circuit ending with a Z-basis readout of every data qubit.
pub fn build_iceberg_circuit(
    circ: &Circuit,
    cycles: usize,
) -> Result<(Circuit, IcebergMeta), IcebergError> {
    let (mut out, meta) = build_iceberg_unmeasured(circ, cycles)?;
    let (readout, _) = out.creg_offset(READOUT).expect("readout register");
    for (p, &d) in meta.data_qubits.iter().enumerate() {
        out.measure(d, readout + p);
    }
    Ok((out, meta))
}

/// Parity check and logical extraction on the `n` readout bits (data order `[t, 1..k, b]`).
pub fn decode_readout(
    bits: &[bool],
    meta: &IcebergMeta,
) -> Result<(bool, Vec<bool>), IcebergError> {
    let n = meta.k + 2;
    if bits.len() != n {
        return Err(IcebergError::LengthMismatch {
            got: bits.len(),
            expected: n,
        });
    }
    let accept = bits.iter().filter(|&&b| b).count() % 2 == 0;
    let b = bits[n - 1];
    Ok((accept, (0..meta.k).map(|i| bits[1 + i] ^ b).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::exact_distribution;
    use crate::sim::statevector;

    #[test]
    fn layout_rejects_odd_k() {
        assert_eq!(
            IcebergLayout::new(3, 1),
            Err(IcebergError::OddQubitCount(3))
        );
        assert_eq!(
            IcebergLayout::new(0, 1),
            Err(IcebergError::OddQubitCount(0))
        );
        assert_eq!(IcebergLayout::new(6, 2).unwrap().n(), 8);
    }

    #[test]
    fn encoded_zero_is_ghz() {
        let (c, _) = build_iceberg_unmeasured(&Circuit::new(2, 0), 0).unwrap();
        let dist = exact_distribution(&c).unwrap();
        assert_eq!(dist.len(), 1);
        let mut data_only = Circuit::new(6, 0);
        data_only.instructions = c.instructions[..4].to_vec();
        let amps = statevector(&data_only).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amps[0].re - h).abs() < 1e-12 && (amps[0b1111].re - h).abs() < 1e-12);
    }

    #[test]
    fn gate_mapping() {
        let layout = IcebergLayout::new(2, 0).unwrap();
        let m =
            map_logical_gate(&Instruction::rotation(GateKind::Rzz, 0.7, &[0, 1]), &layout).unwrap();
        assert_eq!(m[0].qubits, vec![1, 2]);
        let m = map_logical_gate(&Instruction::rotation(GateKind::Rx, 0.7, &[0]), &layout).unwrap();
        assert_eq!(
            (m[0].kind(), m[0].qubits.clone()),
            (GateKind::Rxx, vec![0, 1])
        );
        assert!(map_logical_gate(&Instruction::new(GateKind::H, &[0]), &layout).is_err());
    }

    #[test]
    fn register_shape_for_six_qubits() {
        let mut c = Circuit::new(6, 6);
        for q in 0..6 {
            c.rzz(0.4, q, (q + 1) % 6);
        }
        c.measure_all();
        let (out, meta) = build_iceberg_circuit(&c, 2).unwrap();
        assert_eq!(out.num_qubits(), 10);
        assert_eq!(out.num_clbits(), 1 + 4 + 8);
        assert_eq!(meta.data_qubits.len(), 8);
        assert!(out.is_valid());
    }

    #[test]
    fn decoding() {
        let meta = build_iceberg_circuit(&Circuit::new(2, 0), 0).unwrap().1;
        assert_eq!(
            decode_readout(&[false; 4], &meta).unwrap(),
            (true, vec![false, false])
        );
        assert!(
            !decode_readout(&[true, false, false, false], &meta)
                .unwrap()
                .0
        );
        assert_eq!(
            decode_readout(&[true; 4], &meta).unwrap(),
            (true, vec![false, false])
        );
        assert!(decode_readout(&[true; 3], &meta).is_err());
    }
}
