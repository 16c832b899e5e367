//! Dense statevector simulation. Bit `q` of a basis index is qubit `q`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::{SimError, MAX_STATEVECTOR_QUBITS};
use crate::circuit::{Circuit, GateKind, Instruction};
use crate::pauli::PauliString;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub type Matrix2 = [[C64; 2]; 2];
/// Two-qubit matrix in the basis `|b1 b0⟩` with index `b0 + 2·b1`, where `b0`
/// is the instruction's first qubit.
pub type Matrix4 = [[C64; 4]; 4];

/// Matrix of a single-qubit gate.
pub fn matrix_1q(kind: GateKind, angle: f64) -> Option<Matrix2> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (c, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let m = match kind {
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::H => [
            [C64::new(s, 0.0), C64::new(s, 0.0)],
            [C64::new(s, 0.0), C64::new(-s, 0.0)],
        ],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::T => [[ONE, ZERO], [ZERO, C64::new(s, s)]],
        GateKind::Tdg => [[ONE, ZERO], [ZERO, C64::new(s, -s)]],
        GateKind::Rz => [[C64::new(c, -sn), ZERO], [ZERO, C64::new(c, sn)]],
        GateKind::Rx => [
            [C64::new(c, 0.0), C64::new(0.0, -sn)],
            [C64::new(0.0, -sn), C64::new(c, 0.0)],
        ],
        GateKind::Ry => [
            [C64::new(c, 0.0), C64::new(-sn, 0.0)],
            [C64::new(sn, 0.0), C64::new(c, 0.0)],
        ],
        _ => return None,
    };
    Some(m)
}

/// Matrix of a two-qubit gate, see [`Matrix4`] for the index convention.
pub fn matrix_2q(kind: GateKind, angle: f64) -> Option<Matrix4> {
    let mut m = [[ZERO; 4]; 4];
    let (c, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    match kind {
        GateKind::Cx => {
            // control = first qubit (b0), target = second (b1)
            m[0][0] = ONE;
            m[2][2] = ONE;
            m[3][1] = ONE;
            m[1][3] = ONE;
        }
        GateKind::Cz => {
            m[0][0] = ONE;
            m[1][1] = ONE;
            m[2][2] = ONE;
            m[3][3] = -ONE;
        }
        GateKind::Swap => {
            m[0][0] = ONE;
            m[1][2] = ONE;
            m[2][1] = ONE;
            m[3][3] = ONE;
        }
        GateKind::Rzz => {
            for (i, row) in m.iter_mut().enumerate() {
                let odd = (i & 1) ^ (i >> 1) == 1;
                row[i] = if odd {
                    C64::new(c, sn)
                } else {
                    C64::new(c, -sn)
                };
            }
        }
        GateKind::Rxx | GateKind::Ryy => {
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = C64::new(c, 0.0);
                // X⊗X maps i ↦ 3 - i; Y⊗Y does the same with sign −1 when the parity is even.
                let sign = if kind == GateKind::Ryy && ((i & 1) ^ (i >> 1)) == 0 {
                    -1.0
                } else {
                    1.0
                };
                row[3 - i] = C64::new(0.0, -sn * sign);
            }
        }
        _ => return None,
    }
    Some(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self, SimError> {
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(SimError::TooManyQubits {
                n,
                max: MAX_STATEVECTOR_QUBITS,
            });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(StateVector { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, SimError> {
        let mut sv = StateVector::zero(n)?;
        sv.amps[0] = ZERO;
        sv.amps[index] = ONE;
        Ok(sv)
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        let n = amps.len().trailing_zeros() as usize;
        assert_eq!(1 << n, amps.len(), "amplitude count must be a power of two");
        StateVector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_1q(&mut self, q: usize, m: &Matrix2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_diag_1q(&mut self, q: usize, d0: C64, d1: C64) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { d0 } else { d1 };
        }
    }

    pub fn apply_2q(&mut self, q0: usize, q1: usize, m: &Matrix4) {
        let (b0, b1) = (1usize << q0, 1usize << q1);
        for i in 0..self.amps.len() {
            if i & b0 == 0 && i & b1 == 0 {
                let idx = [i, i | b0, i | b1, i | b0 | b1];
                let v = [
                    self.amps[idx[0]],
                    self.amps[idx[1]],
                    self.amps[idx[2]],
                    self.amps[idx[3]],
                ];
                for r in 0..4 {
                    self.amps[idx[r]] =
                        m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
                }
            }
        }
    }

    /// Applies a unitary instruction; barriers are no-ops.
    pub fn apply(&mut self, inst: &Instruction) -> Result<(), SimError> {
        let q = &inst.qubits;
        let angle = inst.angle().unwrap_or(0.0);
        match inst.kind() {
            GateKind::Barrier => {}
            GateKind::Measure | GateKind::Reset => {
                return Err(SimError::InvalidCircuit(format!(
                    "{} is not unitary",
                    inst.kind()
                )))
            }
            GateKind::X => {
                let bit = 1usize << q[0];
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            GateKind::Z => self.apply_diag_1q(q[0], ONE, -ONE),
            GateKind::S => self.apply_diag_1q(q[0], ONE, I),
            GateKind::Sdg => self.apply_diag_1q(q[0], ONE, -I),
            GateKind::T | GateKind::Tdg | GateKind::Rz => {
                let m = matrix_1q(inst.kind(), angle).expect("diagonal 1q gate");
                self.apply_diag_1q(q[0], m[0][0], m[1][1]);
            }
            GateKind::Cx => {
                let (c, t) = (1usize << q[0], 1usize << q[1]);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateKind::Cz => {
                let mask = (1usize << q[0]) | (1usize << q[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateKind::Swap => {
                let (a, b) = (1usize << q[0], 1usize << q[1]);
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b == 0 {
                        self.amps.swap(i, (i & !a) | b);
                    }
                }
            }
            GateKind::Rzz => {
                let (a, b) = (q[0], q[1]);
                let (even, odd) = (
                    C64::from_polar(1.0, -angle / 2.0),
                    C64::from_polar(1.0, angle / 2.0),
                );
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if ((i >> a) ^ (i >> b)) & 1 == 1 {
                        odd
                    } else {
                        even
                    };
                }
            }
            kind if kind.is_two_qubit() => {
                let m = matrix_2q(kind, angle).expect("two-qubit gate");
                self.apply_2q(q[0], q[1], &m);
            }
            kind => {
                let m = matrix_1q(kind, angle).expect("one-qubit gate");
                self.apply_1q(q[0], &m);
            }
        }
        Ok(())
    }

    /// Applies a Pauli operator including its phase.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        let n = p.num_qubits().min(64);
        let (mut xmask, mut zmask, mut ny) = (0usize, 0usize, 0u32);
        for q in 0..n {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            if x {
                xmask |= 1 << q;
            }
            if z {
                zmask |= 1 << q;
            }
            if x && z {
                ny += 1;
            }
        }
        // Y = i·X·Z, so P|b⟩ = i^{phase + #Y} (−1)^{b·z} |b ⊕ x⟩.
        let k = (u32::from(p.phase().exponent()) + ny) % 4;
        let global = [ONE, I, -ONE, -I][k as usize];
        let mut out = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let sign = if (i & zmask).count_ones() % 2 == 1 {
                -global
            } else {
                global
            };
            out[i ^ xmask] = sign * a;
        }
        self.amps = out;
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects qubit `q` onto `outcome` and renormalises. Returns the outcome probability.
    pub fn collapse(&mut self, q: usize, outcome: bool) -> f64 {
        let bit = 1usize << q;
        let mut norm = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) != outcome {
                *a = ZERO;
            } else {
                norm += a.norm_sqr();
            }
        }
        if norm > 0.0 {
            let scale = 1.0 / norm.sqrt();
            for a in &mut self.amps {
                *a *= scale;
            }
        }
        norm
    }

    pub fn flip(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }
}

/// Final statevector of a circuit whose measurements (if any) are all terminal.
pub fn statevector(circ: &Circuit) -> Result<Vec<C64>, SimError> {
    let mut sv = StateVector::zero(circ.num_qubits())?;
    let terminal = circ.terminal_measurements();
    for (index, inst) in circ.instructions.iter().enumerate() {
        match inst.kind() {
            GateKind::Measure if terminal.binary_search(&index).is_ok() => {}
            GateKind::Measure | GateKind::Reset => {
                return Err(SimError::MidCircuitMeasurement { index })
            }
            _ => sv.apply(inst)?,
        }
    }
    Ok(sv.into_amplitudes())
}

/// Dense unitary (column `j` = image of basis state `j`) of the unitary part of a circuit.
pub fn unitary(circ: &Circuit) -> Result<Vec<Vec<C64>>, SimError> {
    let n = circ.num_qubits();
    let unitary_part = circ.without_nonunitary();
    (0..1usize << n)
        .map(|j| {
            let mut sv = StateVector::basis(n, j)?;
            for inst in &unitary_part.instructions {
                sv.apply(inst)?;
            }
            Ok(sv.into_amplitudes())
        })
        .collect()
}

/// Exact distribution over counts keys, branching on mid-circuit measurements and resets.
pub fn exact_distribution(circ: &Circuit) -> Result<BTreeMap<String, f64>, SimError> {
    let terminal = circ.terminal_measurements();
    let mut out = BTreeMap::new();
    let sv = StateVector::zero(circ.num_qubits())?;
    let clbits = vec![false; circ.num_clbits()];
    branch(circ, &terminal, 0, sv, clbits, 1.0, &mut out)?;
    Ok(out)
}

const BRANCH_CUTOFF: f64 = 1e-14;

fn branch(
    circ: &Circuit,
    terminal: &[usize],
    start: usize,
    mut sv: StateVector,
    mut clbits: Vec<bool>,
    weight: f64,
    out: &mut BTreeMap<String, f64>,
) -> Result<(), SimError> {
    for index in start..circ.instructions.len() {
        let inst = &circ.instructions[index];
        match inst.kind() {
            GateKind::Measure if terminal.binary_search(&index).is_ok() => {}
            GateKind::Measure | GateKind::Reset => {
                let q = inst.qubits[0];
                let p1 = sv.prob_one(q);
                for (outcome, p) in [(false, 1.0 - p1), (true, p1)] {
                    if p <= BRANCH_CUTOFF {
                        continue;
                    }
                    let mut next = sv.clone();
                    next.collapse(q, outcome);
                    let mut bits = clbits.clone();
                    if inst.kind() == GateKind::Measure {
                        bits[inst.clbits[0]] = outcome;
                    } else if outcome {
                        next.flip(q);
                    }
                    branch(circ, terminal, index + 1, next, bits, weight * p, out)?;
                }
                return Ok(());
            }
            _ => sv.apply(inst)?,
        }
    }
    let probs = sv.probabilities();
    let measures: Vec<&Instruction> = terminal.iter().map(|&i| &circ.instructions[i]).collect();
    let mut marginal: BTreeMap<Vec<bool>, f64> = BTreeMap::new();
    for (basis, p) in probs.into_iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        for m in &measures {
            clbits[m.clbits[0]] = (basis >> m.qubits[0]) & 1 == 1;
        }
        *marginal.entry(clbits.clone()).or_insert(0.0) += p;
    }
    for (bits, p) in marginal {
        *out.entry(circ.counts_key(&bits)).or_insert(0.0) += weight * p;
    }
    Ok(())
}
