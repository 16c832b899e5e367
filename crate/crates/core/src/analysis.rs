//! Program analysis: gate-set transpilation, Clifford region discovery and
//! detection-code selection.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::clifford::is_clifford;
use crate::sim::statevector::matrix_1q;

/// A contiguous run `[start, end)` of instructions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub start: usize,
    pub end: usize,
    pub qubits: BTreeSet<usize>,
    pub two_qubit_count: usize,
    pub is_clifford: bool,
}

impl Region {
    pub fn from_range(circ: &Circuit, start: usize, end: usize) -> Region {
        let insts = &circ.instructions[start..end];
        Region {
            start,
            end,
            qubits: insts
                .iter()
                .flat_map(|i| i.qubits.iter().copied())
                .collect(),
            two_qubit_count: insts.iter().filter(|i| i.is_two_qubit()).count(),
            is_clifford: insts.iter().all(is_clifford),
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateSet {
    /// Everything except the two-qubit Pauli rotations, which become cx/rz/cx.
    PcsDefault,
    /// `rz`, `rx`, `rzz`, `rxx` plus terminal measurements.
    IcebergLogical,
}

impl GateSet {
    pub fn name(self) -> &'static str {
        match self {
            GateSet::PcsDefault => "pcs-default",
            GateSet::IcebergLogical => "iceberg-logical",
        }
    }

    pub fn contains(self, kind: GateKind) -> bool {
        use GateKind::*;
        match self {
            GateSet::PcsDefault => !matches!(kind, Rzz | Rxx | Ryy),
            GateSet::IcebergLogical => matches!(kind, Rz | Rx | Rzz | Rxx | Measure | Barrier),
        }
    }
}

impl fmt::Display for GateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pcs-default" => Ok(GateSet::PcsDefault),
            "iceberg-logical" => Ok(GateSet::IcebergLogical),
            other => Err(format!("unknown gate set '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("instruction {index} ({gate}) cannot be expressed in gate set {target}")]
pub struct UnsupportedGate {
    pub index: usize,
    pub gate: GateKind,
    pub target: GateSet,
}

/// Rewrites `circ` into `target`, preserving the unitary up to global phase.
pub fn transpile_to_gateset(circ: &Circuit, target: GateSet) -> Result<Circuit, UnsupportedGate> {
    let terminal: BTreeSet<usize> = circ.terminal_measurements().into_iter().collect();
    let mut out = Circuit {
        qregs: circ.qregs.clone(),
        cregs: circ.cregs.clone(),
        instructions: Vec::new(),
    };
    for (index, inst) in circ.instructions.iter().enumerate() {
        let kind = inst.kind();
        let unsupported = UnsupportedGate {
            index,
            gate: kind,
            target,
        };
        if target == GateSet::IcebergLogical
            && kind == GateKind::Measure
            && !terminal.contains(&index)
        {
            return Err(unsupported);
        }
        if target.contains(kind) {
            out.instructions.push(inst.clone());
            continue;
        }
        let q = &inst.qubits;
        match (target, kind) {
            (_, GateKind::Reset) => return Err(unsupported),
            (GateSet::PcsDefault, GateKind::Rzz | GateKind::Rxx | GateKind::Ryy) => {
                let theta = inst.angle().expect("rotation angle");
                let (pre, post) = two_qubit_basis_change(kind, q[0], q[1], GateSet::PcsDefault);
                out.instructions.extend(pre);
                out.cx(q[0], q[1]).rz(theta, q[1]).cx(q[0], q[1]);
                out.instructions.extend(post);
            }
            (GateSet::IcebergLogical, GateKind::Ryy) => {
                let (pre, post) = two_qubit_basis_change(kind, q[0], q[1], target);
                out.instructions.extend(pre);
                out.rzz(inst.angle().expect("rotation angle"), q[0], q[1]);
                out.instructions.extend(post);
            }
            (GateSet::IcebergLogical, GateKind::Cz) => emit_cz(&mut out, q[0], q[1]),
            (GateSet::IcebergLogical, GateKind::Cx) => emit_cx(&mut out, q[0], q[1]),
            (GateSet::IcebergLogical, GateKind::Swap) => {
                emit_cx(&mut out, q[0], q[1]);
                emit_cx(&mut out, q[1], q[0]);
                emit_cx(&mut out, q[0], q[1]);
            }
            (GateSet::IcebergLogical, GateKind::H) => emit_h(&mut out, q[0]),
            (GateSet::IcebergLogical, _) if inst.qubits.len() == 1 && kind.is_unitary() => {
                let m = matrix_1q(kind, inst.angle().unwrap_or(0.0)).expect("1-qubit unitary");
                out.instructions
                    .extend(zxz_euler(&[m[0][0], m[0][1], m[1][0], m[1][1]], q[0]));
            }
            _ => return Err(unsupported),
        }
    }
    Ok(out)
}

fn emit_h(out: &mut Circuit, q: usize) {
    out.rz(FRAC_PI_2, q).rx(FRAC_PI_2, q).rz(FRAC_PI_2, q);
}

fn emit_cz(out: &mut Circuit, a: usize, b: usize) {
    out.rz(-FRAC_PI_2, a).rz(-FRAC_PI_2, b).rzz(FRAC_PI_2, a, b);
}

fn emit_cx(out: &mut Circuit, c: usize, t: usize) {
    emit_h(out, t);
    emit_cz(out, c, t);
    emit_h(out, t);
}

/// Basis changes turning a ZZ rotation into an XX or YY rotation (time order).
fn two_qubit_basis_change(
    kind: GateKind,
    a: usize,
    b: usize,
    target: GateSet,
) -> (Vec<Instruction>, Vec<Instruction>) {
    let h = |q: usize| -> Vec<Instruction> {
        match target {
            GateSet::PcsDefault => vec![Instruction::new(GateKind::H, &[q])],
            GateSet::IcebergLogical => {
                let mut c = Circuit::default();
                emit_h(&mut c, q);
                c.instructions
            }
        }
    };
    let rx = |theta: f64, q: usize| Instruction::rotation(GateKind::Rx, theta, &[q]);
    match kind {
        GateKind::Rzz => (vec![], vec![]),
        GateKind::Rxx => {
            let basis: Vec<Instruction> = h(a).into_iter().chain(h(b)).collect();
            (basis.clone(), basis)
        }
        GateKind::Ryy => (
            vec![rx(-FRAC_PI_2, a), rx(-FRAC_PI_2, b)],
            vec![rx(FRAC_PI_2, a), rx(FRAC_PI_2, b)],
        ),
        other => unreachable!("{other} is not a two-qubit Pauli rotation"),
    }
}

const EULER_TOL: f64 = 1e-12;

fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    } else if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// `rz(c) rx(b) rz(a)` (time order) equal to `m` up to global phase; zero
/// angles are dropped. `m` is row-major `[m00, m01, m10, m11]`.
pub fn zxz_euler(m: &[C64; 4], q: usize) -> Vec<Instruction> {
    let (m00, m01, m10, m11) = (m[0], m[1], m[2], m[3]);
    let b = 2.0 * m10.norm().atan2(m00.norm());
    let (a, c) = if m10.norm() < EULER_TOL {
        (m11.arg() - m00.arg(), 0.0)
    } else if m00.norm() < EULER_TOL {
        (m10.arg() - m01.arg(), 0.0)
    } else {
        let sum = m11.arg() - m00.arg();
        let diff = m10.arg() - m01.arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    // Half angles fix the off-diagonal sign only up to the sign of b.
    let (s, co) = ((b / 2.0).sin(), (b / 2.0).cos());
    let u00 = C64::from_polar(co, -(a + c) / 2.0);
    let u10 = C64::new(0.0, -s) * C64::from_polar(1.0, (a - c) / 2.0);
    let (got, want) = (u10 * u00.conj(), m10 * m00.conj());
    let b = if (got - want).norm() > (got + want).norm() {
        -b
    } else {
        b
    };
    let mut out = Vec::new();
    for (kind, angle) in [(GateKind::Rz, c), (GateKind::Rx, b), (GateKind::Rz, a)] {
        let angle = wrap_angle(angle);
        if angle.abs() > EULER_TOL {
            out.push(Instruction::rotation(kind, angle, &[q]));
        }
    }
    out
}

/// Maximal runs of consecutive Clifford instructions.
pub fn find_clifford_regions(circ: &Circuit) -> Vec<Region> {
    let mut regions = Vec::new();
    let mut start = None;
    for (i, inst) in circ.instructions.iter().enumerate() {
        match (is_clifford(inst), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                regions.push(Region::from_range(circ, s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        regions.push(Region::from_range(circ, s, circ.instructions.len()));
    }
    regions
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no protectable region: the circuit has no Clifford instructions")]
pub struct NoProtectableRegion;

/// The Clifford region with the most two-qubit gates; ties go to the longer
/// region, then to the earlier one.
pub fn largest_clifford_region(circ: &Circuit) -> Result<Region, NoProtectableRegion> {
    let mut best: Option<Region> = None;
    for r in find_clifford_regions(circ) {
        let better = match &best {
            None => true,
            Some(b) => (r.two_qubit_count, r.len()) > (b.two_qubit_count, b.len()),
        };
        if better {
            best = Some(r);
        }
    }
    best.ok_or(NoProtectableRegion)
}

/// Qubits as vertices, two-qubit instruction counts as edge weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InteractionGraph {
    pub num_nodes: usize,
    /// Keyed by `(a, b)` with `a < b`.
    pub edges: BTreeMap<(usize, usize), usize>,
}

impl InteractionGraph {
    pub fn new(num_nodes: usize) -> Self {
        InteractionGraph {
            num_nodes,
            edges: BTreeMap::new(),
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize, weight: usize) {
        let key = (a.min(b), a.max(b));
        *self.edges.entry(key).or_insert(0) += weight;
    }

    pub fn weight(&self, a: usize, b: usize) -> usize {
        self.edges.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(a, b) in self.edges.keys() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors().iter().map(Vec::len).collect()
    }
}

pub fn interaction_graph(circ: &Circuit) -> InteractionGraph {
    let mut g = InteractionGraph::new(circ.num_qubits());
    for inst in circ.instructions.iter().filter(|i| i.is_two_qubit()) {
        g.add_edge(inst.qubits[0], inst.qubits[1], 1);
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Code {
    Pcs,
    Iceberg,
    None,
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Code::Pcs => "pcs",
            Code::Iceberg => "iceberg",
            Code::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub clifford_min: f64,
    /// Check count assumed when estimating the PCS qubit overhead.
    pub pcs_checks: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            clifford_min: 0.5,
            pcs_checks: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rationale {
    pub clifford_fraction: f64,
    pub two_qubit_pauli_rotation_fraction: f64,
    /// Added qubits over total qubits for each code.
    pub qubit_overhead_pcs: f64,
    pub qubit_overhead_iceberg: f64,
    pub iceberg_compatible: bool,
    pub clifford_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeChoice {
    pub code: Code,
    pub rationale: Rationale,
}

impl Rationale {
    /// The selection rule, applied to the scores alone.
    pub fn decide(&self) -> Code {
        if self.clifford_fraction >= self.clifford_min && self.clifford_fraction > 0.0 {
            Code::Pcs
        } else if self.iceberg_compatible {
            Code::Iceberg
        } else {
            Code::None
        }
    }
}

pub fn select_code(circ: &Circuit, cfg: &SelectionConfig) -> CodeChoice {
    let total = circ.gate_count();
    let n = circ.num_qubits();
    let clifford_gates = largest_clifford_region(circ).map_or(0, |r| r.len());
    let rotations = circ
        .instructions
        .iter()
        .filter(|i| i.kind().is_pauli_rotation_2q())
        .count();
    let frac = |x: usize| {
        if total == 0 {
            0.0
        } else {
            x as f64 / total as f64
        }
    };
    let iceberg_compatible = total > 0
        && n >= 2
        && n.is_multiple_of(2)
        && transpile_to_gateset(circ, GateSet::IcebergLogical).is_ok();
    let rationale = Rationale {
        clifford_fraction: frac(clifford_gates),
        two_qubit_pauli_rotation_fraction: frac(rotations),
        qubit_overhead_pcs: cfg.pcs_checks as f64 / (n + cfg.pcs_checks).max(1) as f64,
        qubit_overhead_iceberg: 4.0 / (n + 4) as f64,
        iceberg_compatible,
        clifford_min: cfg.clifford_min,
    };
    CodeChoice {
        code: rationale.decide(),
        rationale,
    }
}
