//! Circuit intermediate representation shared by every pass.
//!
//! Qubit and classical-bit indices are global: registers are ordered,
//! contiguous partitions of `[0, num_qubits)` and `[0, num_clbits)` whose names
//! only matter for QASM emission and for formatting counts keys.

mod qasm;

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use qasm::{emit_qasm, format_angle, parse_qasm, ParseError, ParseErrorCode};

/// The fixed gate vocabulary of the IR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Cx,
    Cz,
    Swap,
    Rz,
    Rx,
    Ry,
    Rzz,
    Rxx,
    Ryy,
    Measure,
    Reset,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 20] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::Rz,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rzz,
        GateKind::Rxx,
        GateKind::Ryy,
        GateKind::Measure,
        GateKind::Reset,
        GateKind::Barrier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Rz => "rz",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rzz => "rzz",
            GateKind::Rxx => "rxx",
            GateKind::Ryy => "ryy",
            GateKind::Measure => "measure",
            GateKind::Reset => "reset",
            GateKind::Barrier => "barrier",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Fixed qubit arity, `None` for the variadic barrier.
    pub fn num_qubits(self) -> Option<usize> {
        match self {
            GateKind::Barrier => None,
            GateKind::Cx
            | GateKind::Cz
            | GateKind::Swap
            | GateKind::Rzz
            | GateKind::Rxx
            | GateKind::Ryy => Some(2),
            _ => Some(1),
        }
    }

    pub fn num_clbits(self) -> usize {
        usize::from(self == GateKind::Measure)
    }

    pub fn num_params(self) -> usize {
        usize::from(self.is_parameterized())
    }

    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::Rz
                | GateKind::Rx
                | GateKind::Ry
                | GateKind::Rzz
                | GateKind::Rxx
                | GateKind::Ryy
        )
    }

    pub fn is_two_qubit(self) -> bool {
        self.num_qubits() == Some(2)
    }

    /// True for every kind that is a unitary gate (not measure, reset or barrier).
    pub fn is_unitary(self) -> bool {
        !matches!(
            self,
            GateKind::Measure | GateKind::Reset | GateKind::Barrier
        )
    }

    /// Two-qubit Pauli rotations, the native entanglers of the Iceberg logical gate set.
    pub fn is_pauli_rotation_2q(self) -> bool {
        matches!(self, GateKind::Rzz | GateKind::Rxx | GateKind::Ryy)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub params: Vec<f64>,
}

impl Gate {
    pub fn new(kind: GateKind) -> Self {
        Gate {
            kind,
            params: Vec::new(),
        }
    }

    pub fn with_angle(kind: GateKind, angle: f64) -> Self {
        Gate {
            kind,
            params: vec![angle],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        self.params.first().copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub qubits: Vec<usize>,
    pub clbits: Vec<usize>,
}

impl Instruction {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Instruction {
            gate: Gate::new(kind),
            qubits: qubits.to_vec(),
            clbits: Vec::new(),
        }
    }

    pub fn rotation(kind: GateKind, angle: f64, qubits: &[usize]) -> Self {
        Instruction {
            gate: Gate::with_angle(kind, angle),
            qubits: qubits.to_vec(),
            clbits: Vec::new(),
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Instruction {
            gate: Gate::new(GateKind::Measure),
            qubits: vec![qubit],
            clbits: vec![clbit],
        }
    }

    pub fn kind(&self) -> GateKind {
        self.gate.kind
    }

    pub fn angle(&self) -> Option<f64> {
        self.gate.angle()
    }

    pub fn is_unitary(&self) -> bool {
        self.gate.kind.is_unitary()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.gate.kind.is_two_qubit()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub size: usize,
}

impl Register {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Register {
            name: name.into(),
            size,
        }
    }
}

/// One validation finding. `instruction` is `None` for register-level findings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub instruction: Option<usize>,
    pub kind: DiagnosticKind,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Arity,
    Params,
    DuplicateQubit,
    QubitOutOfRange,
    ClbitOutOfRange,
    DuplicateRegister,
    EmptyRegister,
}

impl DiagnosticKind {
    pub fn code(self) -> &'static str {
        match self {
            DiagnosticKind::Arity => "arity",
            DiagnosticKind::Params => "params",
            DiagnosticKind::DuplicateQubit => "duplicate qubit",
            DiagnosticKind::QubitOutOfRange => "qubit out of range",
            DiagnosticKind::ClbitOutOfRange => "clbit out of range",
            DiagnosticKind::DuplicateRegister => "duplicate register",
            DiagnosticKind::EmptyRegister => "empty register",
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.instruction {
            Some(i) => write!(f, "instruction {i}: {}: {}", self.kind.code(), self.message),
            None => write!(f, "{}: {}", self.kind.code(), self.message),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub qregs: Vec<Register>,
    pub cregs: Vec<Register>,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    /// A circuit with a single `q` register and, when `num_clbits > 0`, a single `c` register.
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        let mut circ = Circuit::default();
        if num_qubits > 0 {
            circ.qregs.push(Register::new("q", num_qubits));
        }
        if num_clbits > 0 {
            circ.cregs.push(Register::new("c", num_clbits));
        }
        circ
    }

    pub fn num_qubits(&self) -> usize {
        self.qregs.iter().map(|r| r.size).sum()
    }

    pub fn num_clbits(&self) -> usize {
        self.cregs.iter().map(|r| r.size).sum()
    }

    /// Number of unitary gates (measure, reset and barrier excluded).
    pub fn gate_count(&self) -> usize {
        self.instructions.iter().filter(|i| i.is_unitary()).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| i.is_two_qubit())
            .count()
    }

    /// Appends a fresh quantum register and returns the global index of its first qubit.
    pub fn add_qreg(&mut self, name: impl Into<String>, size: usize) -> usize {
        let start = self.num_qubits();
        self.qregs.push(Register::new(name, size));
        start
    }

    /// Appends a fresh classical register and returns the global index of its first bit.
    pub fn add_creg(&mut self, name: impl Into<String>, size: usize) -> usize {
        let start = self.num_clbits();
        self.cregs.push(Register::new(name, size));
        start
    }

    pub fn creg_offset(&self, name: &str) -> Option<(usize, usize)> {
        let mut offset = 0;
        for reg in &self.cregs {
            if reg.name == name {
                return Some((offset, reg.size));
            }
            offset += reg.size;
        }
        None
    }

    pub fn push(&mut self, inst: Instruction) -> &mut Self {
        self.instructions.push(inst);
        self
    }

    pub fn gate(&mut self, kind: GateKind, qubits: &[usize]) -> &mut Self {
        self.push(Instruction::new(kind, qubits))
    }

    pub fn rotation(&mut self, kind: GateKind, angle: f64, qubits: &[usize]) -> &mut Self {
        self.push(Instruction::rotation(kind, angle, qubits))
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.gate(GateKind::H, &[q])
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.gate(GateKind::X, &[q])
    }

    pub fn s(&mut self, q: usize) -> &mut Self {
        self.gate(GateKind::S, &[q])
    }

    pub fn t(&mut self, q: usize) -> &mut Self {
        self.gate(GateKind::T, &[q])
    }

    pub fn cx(&mut self, c: usize, t: usize) -> &mut Self {
        self.gate(GateKind::Cx, &[c, t])
    }

    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.gate(GateKind::Cz, &[a, b])
    }

    pub fn rz(&mut self, theta: f64, q: usize) -> &mut Self {
        self.rotation(GateKind::Rz, theta, &[q])
    }

    pub fn rx(&mut self, theta: f64, q: usize) -> &mut Self {
        self.rotation(GateKind::Rx, theta, &[q])
    }

    pub fn ry(&mut self, theta: f64, q: usize) -> &mut Self {
        self.rotation(GateKind::Ry, theta, &[q])
    }

    pub fn rzz(&mut self, theta: f64, a: usize, b: usize) -> &mut Self {
        self.rotation(GateKind::Rzz, theta, &[a, b])
    }

    pub fn rxx(&mut self, theta: f64, a: usize, b: usize) -> &mut Self {
        self.rotation(GateKind::Rxx, theta, &[a, b])
    }

    pub fn measure(&mut self, q: usize, c: usize) -> &mut Self {
        self.push(Instruction::measure(q, c))
    }

    pub fn reset(&mut self, q: usize) -> &mut Self {
        self.gate(GateKind::Reset, &[q])
    }

    /// Measures every qubit into the existing bits when there are enough, otherwise into a new `meas` register.
    pub fn measure_all(&mut self) -> &mut Self {
        let n = self.num_qubits();
        let offset = if self.num_clbits() >= n && !self.cregs.is_empty() {
            0
        } else {
            self.add_creg("meas", n)
        };
        for q in 0..n {
            self.measure(q, offset + q);
        }
        self
    }

    /// Checks every structural invariant; empty output means the circuit is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut names = BTreeSet::new();
        for reg in self.qregs.iter().chain(&self.cregs) {
            if !names.insert(reg.name.as_str()) {
                diags.push(Diagnostic {
                    instruction: None,
                    kind: DiagnosticKind::DuplicateRegister,
                    message: format!("register '{}' declared twice", reg.name),
                });
            }
            if reg.size == 0 {
                diags.push(Diagnostic {
                    instruction: None,
                    kind: DiagnosticKind::EmptyRegister,
                    message: format!("register '{}' has size 0", reg.name),
                });
            }
        }
        let nq = self.num_qubits();
        let nc = self.num_clbits();
        for (idx, inst) in self.instructions.iter().enumerate() {
            let kind = inst.kind();
            let mut push = |kind: DiagnosticKind, message: String| {
                diags.push(Diagnostic {
                    instruction: Some(idx),
                    kind,
                    message,
                })
            };
            let arity_ok = match kind.num_qubits() {
                Some(n) => inst.qubits.len() == n,
                None => !inst.qubits.is_empty(),
            };
            if !arity_ok || inst.clbits.len() != kind.num_clbits() {
                push(
                    DiagnosticKind::Arity,
                    format!(
                        "{kind} takes {} qubit(s) and {} clbit(s), got {} and {}",
                        kind.num_qubits()
                            .map_or("≥1".to_string(), |n| n.to_string()),
                        kind.num_clbits(),
                        inst.qubits.len(),
                        inst.clbits.len()
                    ),
                );
            }
            if inst.gate.params.len() != kind.num_params() {
                push(
                    DiagnosticKind::Params,
                    format!(
                        "{kind} takes {} angle(s), got {}",
                        kind.num_params(),
                        inst.gate.params.len()
                    ),
                );
            } else if inst.gate.params.iter().any(|p| !p.is_finite()) {
                push(
                    DiagnosticKind::Params,
                    format!("{kind} has a non-finite angle"),
                );
            }
            let mut seen = BTreeSet::new();
            for &q in &inst.qubits {
                if q >= nq {
                    push(
                        DiagnosticKind::QubitOutOfRange,
                        format!("qubit {q} out of range (num_qubits = {nq})"),
                    );
                }
                if !seen.insert(q) {
                    push(
                        DiagnosticKind::DuplicateQubit,
                        format!("qubit {q} used twice"),
                    );
                }
            }
            for &c in &inst.clbits {
                if c >= nc {
                    push(
                        DiagnosticKind::ClbitOutOfRange,
                        format!("clbit {c} out of range (num_clbits = {nc})"),
                    );
                }
            }
        }
        diags
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Formats classical bits as a counts key: register groups in reverse
    /// declaration order separated by spaces, highest bit index leftmost
    /// within each group.
    pub fn counts_key(&self, bits: &[bool]) -> String {
        format_counts_key(&self.cregs, bits)
    }

    /// Inverse of [`Circuit::counts_key`].
    pub fn parse_counts_key(&self, key: &str) -> Option<Vec<bool>> {
        parse_counts_key(&self.cregs, key)
    }

    /// Indices of measurements that are the last operation on both their qubit and their clbit.
    pub fn terminal_measurements(&self) -> Vec<usize> {
        let mut qubit_done = vec![false; self.num_qubits()];
        let mut clbit_done = vec![false; self.num_clbits()];
        let mut terminal = Vec::new();
        for (idx, inst) in self.instructions.iter().enumerate().rev() {
            if inst.kind() == GateKind::Barrier {
                continue;
            }
            let is_terminal = inst.kind() == GateKind::Measure
                && !qubit_done[inst.qubits[0]]
                && !clbit_done[inst.clbits[0]];
            if is_terminal {
                terminal.push(idx);
            }
            for &q in &inst.qubits {
                qubit_done[q] = true;
            }
            for &c in &inst.clbits {
                clbit_done[c] = true;
            }
        }
        terminal.reverse();
        terminal
    }

    /// The instruction list without measurements, resets and barriers.
    pub fn without_nonunitary(&self) -> Circuit {
        Circuit {
            qregs: self.qregs.clone(),
            cregs: self.cregs.clone(),
            instructions: self
                .instructions
                .iter()
                .filter(|i| i.is_unitary())
                .cloned()
                .collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let instructions: Vec<_> = self
            .instructions
            .iter()
            .map(|i| {
                serde_json::json!({
                    "name": i.kind().name(),
                    "params": i.gate.params,
                    "qubits": i.qubits,
                    "clbits": i.clbits,
                })
            })
            .collect();
        serde_json::json!({
            "num_qubits": self.num_qubits(),
            "num_clbits": self.num_clbits(),
            "registers": {"qregs": self.qregs, "cregs": self.cregs},
            "instructions": instructions,
        })
    }
}

pub(crate) fn format_counts_key(cregs: &[Register], bits: &[bool]) -> String {
    let mut groups = Vec::with_capacity(cregs.len());
    let mut offset = 0;
    for reg in cregs {
        let group: String = (0..reg.size)
            .rev()
            .map(|i| {
                if bits.get(offset + i).copied().unwrap_or(false) {
                    '1'
                } else {
                    '0'
                }
            })
            .collect();
        offset += reg.size;
        if reg.size > 0 {
            groups.push(group);
        }
    }
    groups.reverse();
    groups.join(" ")
}

pub fn parse_counts_key(cregs: &[Register], key: &str) -> Option<Vec<bool>> {
    let sized: Vec<&Register> = cregs.iter().filter(|r| r.size > 0).collect();
    let groups: Vec<&str> = key.split(' ').collect();
    if groups.len() != sized.len() {
        return None;
    }
    let mut bits = Vec::new();
    for (reg, group) in sized.iter().zip(groups.iter().rev()) {
        if group.len() != reg.size {
            return None;
        }
        for ch in group.chars().rev() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return None,
            }
        }
    }
    Some(bits)
}

/// Normalises an angle to a quarter-turn count modulo 4 when it is a multiple of π/2.
pub fn quarter_turns(theta: f64) -> Option<u8> {
    let k = theta / FRAC_PI_2;
    let rounded = k.round();
    if (k - rounded).abs() <= 1e-12 * rounded.abs().max(1.0) {
        Some(rounded.rem_euclid(4.0) as u8)
    } else {
        None
    }
}
