//! Pauli check sandwiching.
//!
//! A check pair `(L, R)` around a Clifford payload `U` satisfies
//! `R U L = ±U`. Controlling both on an ancilla prepared in `|+⟩` leaves the
//! data untouched and kicks the sign onto the ancilla; payload faults that
//! anticommute with `R` flip it.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    largest_clifford_region, transpile_to_gateset, GateSet, NoProtectableRegion, Region,
};
use crate::circuit::{Circuit, GateKind, Instruction, Register};
use crate::clifford::{clifford_decomposition, CliffordError, CliffordGate, CliffordTableau};
use crate::pauli::{Pauli, PauliString, Phase};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckPair {
    pub left: PauliString,
    pub right: PauliString,
    pub sign: i8,
    pub ancilla: usize,
}

impl CheckPair {
    /// The ancilla bit a fault-free run produces.
    pub fn expected_bit(&self) -> bool {
        self.sign < 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    GreedyCoverage,
    RandomZ,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PcsError {
    #[error("payload instruction {index} ({gate}) is not Clifford")]
    NonClifford { index: usize, gate: GateKind },
    #[error("at least one check is required")]
    NoChecks,
    #[error("payload touches no qubits")]
    EmptyPayload,
    #[error("{requested} checks requested but only {available} distinct candidates exist")]
    TooManyChecks { requested: usize, available: usize },
    #[error("region [{start}, {end}) is outside the circuit")]
    RegionOutOfRange { start: usize, end: usize },
    #[error("region contains measurement or reset at instruction {index}")]
    RegionHasMeasurement { index: usize },
    #[error("check {index} does not satisfy R U L = ±U for the payload")]
    InvalidCheck { index: usize },
    #[error(transparent)]
    NoRegion(#[from] NoProtectableRegion),
}

/// A Clifford region with its tableau over the full register.
#[derive(Clone, Debug)]
pub struct Payload {
    pub region: Region,
    pub num_qubits: usize,
    pub tableau: CliffordTableau,
    gates: Vec<Vec<CliffordGate>>,
}

impl Payload {
    pub fn new(circ: &Circuit, region: &Region) -> Result<Payload, PcsError> {
        if region.start > region.end || region.end > circ.instructions.len() {
            return Err(PcsError::RegionOutOfRange {
                start: region.start,
                end: region.end,
            });
        }
        let n = circ.num_qubits();
        let mut gates = Vec::with_capacity(region.len());
        let mut tableau = CliffordTableau::identity(n);
        for index in region.start..region.end {
            let inst = &circ.instructions[index];
            if matches!(inst.kind(), GateKind::Measure | GateKind::Reset) {
                return Err(PcsError::RegionHasMeasurement { index });
            }
            let g = if inst.kind() == GateKind::Barrier {
                Vec::new()
            } else {
                clifford_decomposition(inst).ok_or(PcsError::NonClifford {
                    index,
                    gate: inst.kind(),
                })?
            };
            for &gate in &g {
                tableau.apply(gate);
            }
            gates.push(g);
        }
        let region = Region::from_range(circ, region.start, region.end);
        Ok(Payload {
            region,
            num_qubits: n,
            tableau,
            gates,
        })
    }

    /// Builds the check pair for `left` (phase forced to +1).
    pub fn check_for(&self, left: &PauliString, ancilla: usize) -> CheckPair {
        let left = left.clone().with_phase(Phase::ONE);
        let conj = match self.tableau.conjugate(&left) {
            Ok(p) => p,
            Err(CliffordError::Pauli(e)) => panic!("dimension mismatch: {e}"),
            Err(e) => panic!("{e}"),
        };
        let sign = conj
            .sign()
            .expect("Hermitian input conjugates to a Hermitian output");
        CheckPair {
            left,
            right: conj.with_phase(Phase::ONE),
            sign,
            ancilla,
        }
    }

    /// Every single-qubit fault after every payload instruction, propagated
    /// to the end of the payload.
    pub fn propagated_faults(&self, circ: &Circuit) -> Vec<PauliString> {
        let n = self.num_qubits;
        let mut faults = Vec::new();
        for (offset, index) in (self.region.start..self.region.end).enumerate() {
            for &q in &circ.instructions[index].qubits {
                for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
                    let mut p = PauliString::single(n, q, letter);
                    for gates in &self.gates[offset + 1..] {
                        gates.iter().for_each(|g| g.conjugate(&mut p));
                    }
                    faults.push(p);
                }
            }
        }
        faults
    }
}

/// Weight-1 and weight-2 Paulis over `qubits`, in a fixed order.
fn candidates(n: usize, qubits: &[usize], z_only: bool) -> Vec<PauliString> {
    let letters: &[Pauli] = if z_only {
        &[Pauli::Z]
    } else {
        &[Pauli::X, Pauli::Y, Pauli::Z]
    };
    let mut out = Vec::new();
    for (i, &a) in qubits.iter().enumerate() {
        for &la in letters {
            out.push(PauliString::single(n, a, la));
            for &b in &qubits[i + 1..] {
                for &lb in letters {
                    out.push(PauliString::from_factors(n, &[(a, la), (b, lb)]));
                }
            }
        }
    }
    out
}

/// Chooses `num_checks` distinct check pairs for `payload`. Ancilla `i` is
/// numbered `payload.num_qubits + i`.
pub fn synthesize_checks(
    payload: &Payload,
    circ: &Circuit,
    num_checks: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<Vec<CheckPair>, PcsError> {
    if num_checks == 0 {
        return Err(PcsError::NoChecks);
    }
    let qubits: Vec<usize> = payload.region.qubits.iter().copied().collect();
    if qubits.is_empty() {
        return Err(PcsError::EmptyPayload);
    }
    let n = payload.num_qubits;
    let mut pool = candidates(n, &qubits, strategy == Strategy::RandomZ);
    if num_checks > pool.len() {
        return Err(PcsError::TooManyChecks {
            requested: num_checks,
            available: pool.len(),
        });
    }
    let lefts = match strategy {
        Strategy::RandomZ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut chosen: Vec<PauliString> = Vec::new();
            while chosen.len() < num_checks {
                let pick = pool.choose(&mut rng).expect("non-empty pool").clone();
                if !chosen.contains(&pick) {
                    chosen.push(pick);
                }
            }
            chosen
        }
        Strategy::GreedyCoverage => {
            pool.sort_by_key(|p| p.to_string());
            let faults = payload.propagated_faults(circ);
            let rights: Vec<PauliString> =
                pool.iter().map(|l| payload.check_for(l, 0).right).collect();
            let mut covered = vec![false; faults.len()];
            let mut used = vec![false; pool.len()];
            let mut chosen = Vec::new();
            for _ in 0..num_checks {
                let mut best: Option<(usize, usize)> = None;
                for (c, right) in rights.iter().enumerate() {
                    if used[c] {
                        continue;
                    }
                    let gain = faults
                        .iter()
                        .zip(&covered)
                        .filter(|(f, &cov)| !cov && !f.commutes_with(right))
                        .count();
                    if best.is_none_or(|(_, g)| gain > g) {
                        best = Some((c, gain));
                    }
                }
                let (c, _) = best.expect("enough candidates");
                used[c] = true;
                for (f, cov) in faults.iter().zip(covered.iter_mut()) {
                    *cov |= !f.commutes_with(&rights[c]);
                }
                chosen.push(pool[c].clone());
            }
            chosen
        }
    };
    Ok(lefts
        .iter()
        .enumerate()
        .map(|(i, l)| payload.check_for(l, n + i))
        .collect())
}

/// Classical register holding the check outcomes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaRegister {
    pub name: String,
    /// Global clbit indices, one per check.
    pub bits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcsMeta {
    pub checks: Vec<CheckPair>,
    /// Formatted like a counts-key group: check 0 is the rightmost character.
    pub expected_ancilla_bits: String,
    pub payload: (usize, usize),
    pub ancilla_register: AncillaRegister,
    /// Classical registers of the compiled circuit, in declaration order.
    pub cregs: Vec<Register>,
    pub num_data_qubits: usize,
    /// Indices (in the compiled circuit) of every instruction added by the pass.
    pub inserted: Vec<usize>,
}

impl PcsMeta {
    pub fn ancilla_qubits(&self) -> Vec<usize> {
        self.checks.iter().map(|c| c.ancilla).collect()
    }
}

fn unique_name(circ: &Circuit, base: &str) -> String {
    let taken: BTreeSet<&str> = circ
        .qregs
        .iter()
        .chain(&circ.cregs)
        .map(|r| r.name.as_str())
        .collect();
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken.contains(n.as_str()))
        .expect("unbounded")
}

fn controlled_pauli(anc: usize, p: &PauliString, out: &mut Vec<Instruction>) {
    for q in p.support() {
        match p.get(q) {
            Pauli::X => out.push(Instruction::new(GateKind::Cx, &[anc, q])),
            Pauli::Z => out.push(Instruction::new(GateKind::Cz, &[anc, q])),
            Pauli::Y => {
                out.push(Instruction::new(GateKind::Sdg, &[q]));
                out.push(Instruction::new(GateKind::Cx, &[anc, q]));
                out.push(Instruction::new(GateKind::S, &[q]));
            }
            Pauli::I => {}
        }
    }
}

/// Wraps `region` in the nested sandwich `L_m … L_1 U R_1 … R_m` (time
/// order), measuring each ancilla right after its right check.
pub fn insert_pcs(
    circ: &Circuit,
    region: &Region,
    checks: &[CheckPair],
) -> Result<(Circuit, PcsMeta), PcsError> {
    if checks.is_empty() {
        return Err(PcsError::NoChecks);
    }
    let payload = Payload::new(circ, region)?;
    let n = circ.num_qubits();
    let m = checks.len();
    let checks: Vec<CheckPair> = checks
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let fresh = payload.check_for(&c.left, n + i);
            if c.left.num_qubits() != n
                || c.left.is_identity()
                || fresh.right != c.right
                || fresh.sign != c.sign
            {
                Err(PcsError::InvalidCheck { index: i })
            } else {
                Ok(fresh)
            }
        })
        .collect::<Result<_, _>>()?;

    let mut out = Circuit {
        qregs: circ.qregs.clone(),
        cregs: circ.cregs.clone(),
        instructions: Vec::new(),
    };
    let qname = unique_name(circ, "ancq");
    out.add_qreg(qname, m);
    let cname = unique_name(&out, "anc");
    let coff = out.add_creg(cname.clone(), m);

    let mut inserted = Vec::new();
    let mut push_inserted = |out: &mut Circuit, insts: Vec<Instruction>| {
        for inst in insts {
            inserted.push(out.instructions.len());
            out.instructions.push(inst);
        }
    };
    out.instructions
        .extend_from_slice(&circ.instructions[..region.start]);
    for c in checks.iter().rev() {
        let mut block = vec![Instruction::new(GateKind::H, &[c.ancilla])];
        controlled_pauli(c.ancilla, &c.left, &mut block);
        push_inserted(&mut out, block);
    }
    out.instructions
        .extend_from_slice(&circ.instructions[region.start..region.end]);
    for (i, c) in checks.iter().enumerate() {
        let mut block = Vec::new();
        controlled_pauli(c.ancilla, &c.right, &mut block);
        block.push(Instruction::new(GateKind::H, &[c.ancilla]));
        block.push(Instruction::measure(c.ancilla, coff + i));
        push_inserted(&mut out, block);
    }
    out.instructions
        .extend_from_slice(&circ.instructions[region.end..]);

    let expected: String = checks
        .iter()
        .rev()
        .map(|c| if c.expected_bit() { '1' } else { '0' })
        .collect();
    let meta = PcsMeta {
        expected_ancilla_bits: expected,
        payload: (region.start, region.end),
        ancilla_register: AncillaRegister {
            name: cname,
            bits: (coff..coff + m).collect(),
        },
        cregs: out.cregs.clone(),
        num_data_qubits: n,
        inserted,
        checks,
    };
    Ok((out, meta))
}

/// Removes everything [`insert_pcs`] added.
pub fn strip_pcs(circ: &Circuit, meta: &PcsMeta) -> Circuit {
    let inserted: BTreeSet<usize> = meta.inserted.iter().copied().collect();
    let mut qregs = circ.qregs.clone();
    qregs.pop();
    let cregs = circ
        .cregs
        .iter()
        .filter(|r| r.name != meta.ancilla_register.name)
        .cloned()
        .collect();
    Circuit {
        qregs,
        cregs,
        instructions: circ
            .instructions
            .iter()
            .enumerate()
            .filter(|(i, _)| !inserted.contains(i))
            .map(|(_, inst)| inst.clone())
            .collect(),
    }
}

/// Transpiles to `pcs-default` and protects the largest Clifford region.
pub fn convert_to_pcs_largest_clifford(
    circ: &Circuit,
    num_checks: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<(Circuit, PcsMeta), PcsError> {
    let native = transpile_to_gateset(circ, GateSet::PcsDefault)
        .expect("pcs-default accepts every unitary gate");
    let region = largest_clifford_region(&native)?;
    let payload = Payload::new(&native, &region)?;
    let checks = synthesize_checks(&payload, &native, num_checks, strategy, seed)?;
    insert_pcs(&native, &region, &checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn payload_of(c: &Circuit) -> Payload {
        Payload::new(c, &Region::from_range(c, 0, c.instructions.len())).unwrap()
    }

    #[test]
    fn s_payload_with_y_has_negative_sign() {
        let mut c = Circuit::new(1, 0);
        c.s(0);
        let pair = payload_of(&c).check_for(&"Y".parse().unwrap(), 1);
        assert_eq!(pair.right.to_string(), "+X");
        assert_eq!(pair.sign, -1);
        assert!(pair.expected_bit());
    }

    #[test]
    fn cx_payload_spreads_x() {
        let mut c = Circuit::new(2, 0);
        c.cx(0, 1);
        let pair = payload_of(&c).check_for(&"IX".parse().unwrap(), 2);
        assert_eq!(pair.right.to_string(), "+XX");
        assert_eq!(pair.sign, 1);
    }

    #[test]
    fn identity_payload_checks_are_trivial() {
        let mut c = Circuit::new(2, 0);
        c.x(0).x(0).gate(GateKind::Z, &[1]).gate(GateKind::Z, &[1]);
        let p = payload_of(&c);
        for strategy in [Strategy::GreedyCoverage, Strategy::RandomZ] {
            for pair in synthesize_checks(&p, &c, 3, strategy, 9).unwrap() {
                assert_eq!(pair.left.letters(), pair.right.letters());
                assert_eq!(pair.sign, 1);
            }
        }
    }

    #[test]
    fn greedy_is_deterministic_and_distinct() {
        let mut c = Circuit::new(3, 0);
        c.h(0).cx(0, 1).s(1).cx(1, 2).h(2);
        let p = payload_of(&c);
        let a = synthesize_checks(&p, &c, 4, Strategy::GreedyCoverage, 0).unwrap();
        let b = synthesize_checks(&p, &c, 4, Strategy::GreedyCoverage, 123).unwrap();
        assert_eq!(a, b);
        let lefts: BTreeSet<String> = a.iter().map(|c| c.left.to_string()).collect();
        assert_eq!(lefts.len(), 4);
    }

    #[test]
    fn too_many_random_z_checks() {
        let mut c = Circuit::new(2, 0);
        c.cx(0, 1);
        let p = payload_of(&c);
        assert_eq!(
            synthesize_checks(&p, &c, 4, Strategy::RandomZ, 0),
            Err(PcsError::TooManyChecks {
                requested: 4,
                available: 3
            })
        );
    }

    #[test]
    fn insertion_counts_and_strip() {
        let mut c = Circuit::new(2, 2);
        c.h(0).cx(0, 1).cx(0, 1).measure(0, 0).measure(1, 1);
        let region = Region::from_range(&c, 0, 3);
        let p = Payload::new(&c, &region).unwrap();
        let checks = vec![
            p.check_for(&"IX".parse().unwrap(), 2),
            p.check_for(&"ZI".parse().unwrap(), 3),
        ];
        let (out, meta) = insert_pcs(&c, &region, &checks).unwrap();
        assert_eq!(out.num_qubits(), 4);
        assert_eq!(out.num_clbits(), 4);
        let weights: usize = checks
            .iter()
            .map(|c| c.left.weight() + c.right.weight())
            .sum();
        assert_eq!(
            out.instructions.len(),
            c.instructions.len() + weights + 4 + 2
        );
        assert_eq!(meta.expected_ancilla_bits, "00");
        assert_eq!(strip_pcs(&out, &meta), c);
        assert!(out.is_valid());
    }

    #[test]
    fn region_with_measurement_rejected() {
        let mut c = Circuit::new(1, 1);
        c.h(0).measure(0, 0);
        let region = Region {
            start: 0,
            end: 2,
            qubits: [0].into(),
            two_qubit_count: 0,
            is_clifford: false,
        };
        assert!(matches!(
            Payload::new(&c, &region),
            Err(PcsError::RegionHasMeasurement { index: 1 })
        ));
    }
}
