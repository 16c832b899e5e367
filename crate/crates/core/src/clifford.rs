//! Clifford recognition and the symplectic tableau used to compute `U L U†`.

use std::fmt;

use crate::circuit::{quarter_turns, GateKind, Instruction};
use crate::pauli::{PauliError, PauliString, Phase};

/// Elementary Clifford generators understood by the tableau engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl CliffordGate {
    /// Conjugates `p` in place: `p ← G p G†`.
    pub fn conjugate(self, p: &mut PauliString) {
        match self {
            CliffordGate::H(q) => p.conj_h(q),
            CliffordGate::S(q) => p.conj_s(q),
            CliffordGate::Sdg(q) => p.conj_sdg(q),
            CliffordGate::X(q) => p.conj_x(q),
            CliffordGate::Y(q) => p.conj_y(q),
            CliffordGate::Z(q) => p.conj_z(q),
            CliffordGate::Cx(c, t) => p.conj_cx(c, t),
            CliffordGate::Cz(a, b) => p.conj_cz(a, b),
            CliffordGate::Swap(a, b) => p.conj_swap(a, b),
        }
    }

    pub fn qubits(self) -> (usize, Option<usize>) {
        match self {
            CliffordGate::H(q)
            | CliffordGate::S(q)
            | CliffordGate::Sdg(q)
            | CliffordGate::X(q)
            | CliffordGate::Y(q)
            | CliffordGate::Z(q) => (q, None),
            CliffordGate::Cx(a, b) | CliffordGate::Cz(a, b) | CliffordGate::Swap(a, b) => {
                (a, Some(b))
            }
        }
    }
}

/// True for gates the region analysis treats as Clifford: the named Clifford
/// kinds plus `rz`/`rx`/`ry` at multiples of π/2.
pub fn is_clifford(inst: &Instruction) -> bool {
    match inst.kind() {
        GateKind::X
        | GateKind::Y
        | GateKind::Z
        | GateKind::H
        | GateKind::S
        | GateKind::Sdg
        | GateKind::Cx
        | GateKind::Cz
        | GateKind::Swap => true,
        GateKind::Rz | GateKind::Rx | GateKind::Ry => {
            inst.angle().and_then(quarter_turns).is_some()
        }
        _ => false,
    }
}

fn rz_quarter(k: u8, q: usize, out: &mut Vec<CliffordGate>) {
    match k {
        1 => out.push(CliffordGate::S(q)),
        2 => out.push(CliffordGate::Z(q)),
        3 => out.push(CliffordGate::Sdg(q)),
        _ => {}
    }
}

fn rx_quarter(k: u8, q: usize, out: &mut Vec<CliffordGate>) {
    match k {
        1 => out.extend([CliffordGate::H(q), CliffordGate::S(q), CliffordGate::H(q)]),
        2 => out.push(CliffordGate::X(q)),
        3 => out.extend([CliffordGate::H(q), CliffordGate::Sdg(q), CliffordGate::H(q)]),
        _ => {}
    }
}

fn ry_quarter(k: u8, q: usize, out: &mut Vec<CliffordGate>) {
    match k {
        1 => out.extend([CliffordGate::Z(q), CliffordGate::H(q)]),
        2 => out.push(CliffordGate::Y(q)),
        3 => out.extend([CliffordGate::H(q), CliffordGate::Z(q)]),
        _ => {}
    }
}

/// Expands an instruction into Clifford generators (time order, equal up to
/// global phase). Besides everything [`is_clifford`] accepts, the two-qubit
/// Pauli rotations `rzz`/`rxx`/`ryy` at quarter turns are expanded too, so the
/// stabilizer engines can run Clifford-angle Iceberg circuits.
///
/// Returns `None` for non-Clifford unitaries and for measure/reset/barrier.
pub fn clifford_decomposition(inst: &Instruction) -> Option<Vec<CliffordGate>> {
    let q = &inst.qubits;
    let mut out = Vec::new();
    match inst.kind() {
        GateKind::X => out.push(CliffordGate::X(q[0])),
        GateKind::Y => out.push(CliffordGate::Y(q[0])),
        GateKind::Z => out.push(CliffordGate::Z(q[0])),
        GateKind::H => out.push(CliffordGate::H(q[0])),
        GateKind::S => out.push(CliffordGate::S(q[0])),
        GateKind::Sdg => out.push(CliffordGate::Sdg(q[0])),
        GateKind::Cx => out.push(CliffordGate::Cx(q[0], q[1])),
        GateKind::Cz => out.push(CliffordGate::Cz(q[0], q[1])),
        GateKind::Swap => out.push(CliffordGate::Swap(q[0], q[1])),
        GateKind::Rz => rz_quarter(quarter_turns(inst.angle()?)?, q[0], &mut out),
        GateKind::Rx => rx_quarter(quarter_turns(inst.angle()?)?, q[0], &mut out),
        GateKind::Ry => ry_quarter(quarter_turns(inst.angle()?)?, q[0], &mut out),
        GateKind::Rzz | GateKind::Rxx | GateKind::Ryy => {
            let k = quarter_turns(inst.angle()?)?;
            let (a, b) = (q[0], q[1]);
            let (pre, post): (Vec<CliffordGate>, Vec<CliffordGate>) = match inst.kind() {
                GateKind::Rzz => (vec![], vec![]),
                GateKind::Rxx => (
                    vec![CliffordGate::H(a), CliffordGate::H(b)],
                    vec![CliffordGate::H(a), CliffordGate::H(b)],
                ),
                _ => {
                    // Ryy(θ) = V·Rzz(θ)·V† with V = Rx(π/2)⊗Rx(π/2).
                    let mut pre = Vec::new();
                    rx_quarter(3, a, &mut pre);
                    rx_quarter(3, b, &mut pre);
                    let mut post = Vec::new();
                    rx_quarter(1, a, &mut post);
                    rx_quarter(1, b, &mut post);
                    (pre, post)
                }
            };
            out.extend(pre);
            if k != 0 {
                out.push(CliffordGate::Cx(a, b));
                rz_quarter(k, b, &mut out);
                out.push(CliffordGate::Cx(a, b));
            }
            out.extend(post);
        }
        GateKind::T | GateKind::Tdg | GateKind::Measure | GateKind::Reset | GateKind::Barrier => {
            return None
        }
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CliffordError {
    #[error("instruction {index} ({gate}) is not Clifford")]
    NonClifford { index: usize, gate: GateKind },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("qubit {qubit} outside a {n}-qubit tableau")]
    QubitOutOfRange { qubit: usize, n: usize },
}

/// Images of the Pauli generators under conjugation by a Clifford unitary `U`.
///
/// `rows[q]` holds `U X_q U†` and `rows[n + q]` holds `U Z_q U†`.
#[derive(Clone, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    rows: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliString::single(n, q, crate::pauli::Pauli::X));
        }
        for q in 0..n {
            rows.push(PauliString::single(n, q, crate::pauli::Pauli::Z));
        }
        CliffordTableau { n, rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, q: usize) -> &PauliString {
        &self.rows[q]
    }

    pub fn z_image(&self, q: usize) -> &PauliString {
        &self.rows[self.n + q]
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    /// Left-multiplies the tableau's unitary by `gate`: `U ← G U`.
    pub fn apply(&mut self, gate: CliffordGate) {
        for row in &mut self.rows {
            gate.conjugate(row);
        }
    }

    /// Composes instructions in order on an `n`-qubit register.
    pub fn from_instructions(n: usize, insts: &[Instruction]) -> Result<Self, CliffordError> {
        let mut tab = CliffordTableau::identity(n);
        for (index, inst) in insts.iter().enumerate() {
            if let Some(&q) = inst.qubits.iter().find(|&&q| q >= n) {
                return Err(CliffordError::QubitOutOfRange { qubit: q, n });
            }
            let gates = clifford_decomposition(inst).ok_or(CliffordError::NonClifford {
                index,
                gate: inst.kind(),
            })?;
            for g in gates {
                tab.apply(g);
            }
        }
        Ok(tab)
    }

    /// Tableau of `first` followed by `second`.
    pub fn then(&self, second: &CliffordTableau) -> Result<Self, CliffordError> {
        let rows = self
            .rows
            .iter()
            .map(|r| second.conjugate(r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CliffordTableau { n: self.n, rows })
    }

    /// Computes `U L U†` including its phase.
    pub fn conjugate(&self, l: &PauliString) -> Result<PauliString, CliffordError> {
        if l.num_qubits() != self.n {
            return Err(PauliError::DimensionMismatch(self.n, l.num_qubits()).into());
        }
        let mut acc = PauliString::identity(self.n);
        // L = i^{phase} ∏_q i^{x_q z_q} X_q^{x_q} Z_q^{z_q}
        let mut k = u32::from(l.phase().exponent());
        for q in 0..self.n {
            let (x, z) = (l.x_bit(q), l.z_bit(q));
            if x && z {
                k += 1;
            }
            if x {
                acc.mul_assign(&self.rows[q]);
            }
            if z {
                acc.mul_assign(&self.rows[self.n + q]);
            }
        }
        let phase = acc.phase() * Phase::from_exponent(k);
        acc.set_phase(phase);
        Ok(acc)
    }

    /// Checks the symplectic commutation relations of the rows.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            if !self.rows[i].is_hermitian() {
                return false;
            }
            for j in (i + 1)..2 * n {
                let should_anticommute = j == i + n;
                if self.rows[i].commutes_with(&self.rows[j]) == should_anticommute {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            writeln!(f, "X{q} -> {}", self.rows[q])?;
        }
        for q in 0..self.n {
            writeln!(f, "Z{q} -> {}", self.rows[self.n + q])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use std::f64::consts::PI;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn tab(c: &Circuit) -> CliffordTableau {
        CliffordTableau::from_instructions(c.num_qubits(), &c.instructions).unwrap()
    }

    #[test]
    fn classification() {
        assert!(is_clifford(&Instruction::new(GateKind::H, &[0])));
        assert!(!is_clifford(&Instruction::new(GateKind::T, &[0])));
        assert!(is_clifford(&Instruction::rotation(
            GateKind::Rz,
            PI / 2.0,
            &[0]
        )));
        assert!(!is_clifford(&Instruction::rotation(
            GateKind::Rz,
            0.3,
            &[0]
        )));
        assert!(!is_clifford(&Instruction::rotation(
            GateKind::Rzz,
            PI / 2.0,
            &[0, 1]
        )));
        assert!(!is_clifford(&Instruction::measure(0, 0)));
    }

    #[test]
    fn empty_is_identity() {
        let t = CliffordTableau::from_instructions(3, &[]).unwrap();
        assert_eq!(t, CliffordTableau::identity(3));
        assert_eq!(t.conjugate(&p("XYZ")).unwrap(), p("+XYZ"));
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let mut c = Circuit::new(1, 0);
        c.h(0);
        let t = tab(&c);
        assert_eq!(t.x_image(0), &p("+Z"));
        assert_eq!(t.z_image(0), &p("+X"));
    }

    #[test]
    fn cx_images() {
        let mut c = Circuit::new(2, 0);
        c.cx(0, 1);
        let t = tab(&c);
        assert_eq!(t.x_image(0), &p("+XX"));
        assert_eq!(t.z_image(1), &p("+ZZ"));
        assert_eq!(t.x_image(1), &p("+XI"));
        assert_eq!(t.z_image(0), &p("+IZ"));
        assert_eq!(t.conjugate(&p("IX")).unwrap(), p("+XX"));
    }

    #[test]
    fn s_conjugates_y_to_minus_x() {
        let mut c = Circuit::new(1, 0);
        c.s(0);
        assert_eq!(tab(&c).conjugate(&p("Y")).unwrap(), p("-X"));
    }

    #[test]
    fn non_clifford_rejected() {
        let mut c = Circuit::new(1, 0);
        c.h(0).t(0);
        let err = CliffordTableau::from_instructions(1, &c.instructions).unwrap_err();
        assert_eq!(
            err,
            CliffordError::NonClifford {
                index: 1,
                gate: GateKind::T
            }
        );
    }

    #[test]
    fn dimension_checked() {
        let t = CliffordTableau::identity(2);
        assert!(t.conjugate(&p("X")).is_err());
    }

    #[test]
    fn composition_matches_concatenation() {
        let mut a = Circuit::new(3, 0);
        a.h(0).cx(0, 1).s(2).cz(1, 2);
        let mut b = Circuit::new(3, 0);
        b.gate(GateKind::Sdg, &[1])
            .cx(2, 0)
            .gate(GateKind::Swap, &[0, 1])
            .gate(GateKind::Y, &[2]);
        let mut ab = a.clone();
        ab.instructions.extend(b.instructions.clone());
        assert_eq!(tab(&a).then(&tab(&b)).unwrap(), tab(&ab));
        assert!(tab(&ab).is_symplectic());
    }
}
