//! Signed Pauli strings in symplectic form.
//!
//! A string stores one x-bit and one z-bit per qubit packed into 64-bit words,
//! plus a global phase `i^k`. The pair `(x, z) = (1, 1)` denotes `Y` itself
//! (not `XZ`), so Hermitian strings always carry phase `+1` or `-1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

/// A power of `i`: `Phase(0) = +1`, `Phase(1) = +i`, `Phase(2) = -1`, `Phase(3) = -i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Phase {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PauliError {
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("invalid Pauli string '{0}'")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            phase: Phase::ONE,
        }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = PauliString::identity(n);
        s.set(qubit, p);
        s
    }

    /// Builds a string from `(qubit, Pauli)` factors.
    pub fn from_factors(n: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut s = PauliString::identity(n);
        for &(q, p) in factors {
            s.set(q, p);
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Sign of a Hermitian string; `None` for `±i` phases.
    pub fn sign(&self) -> Option<i8> {
        self.phase.sign()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    fn put(v: &mut [u64], q: usize, bit: bool) {
        let mask = 1u64 << (q % 64);
        if bit {
            v[q / 64] |= mask;
        } else {
            v[q / 64] &= !mask;
        }
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        Self::put(&mut self.x, q, x);
        Self::put(&mut self.z, q, z);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones() & 1;
        }
        parity == 0
    }

    /// The product `self · other` with exact global phase.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        if self.n != other.n {
            return Err(PauliError::DimensionMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        out.mul_assign(other);
        Ok(out)
    }

    /// In-place `self ← self · other`. Panics in debug builds on dimension mismatch.
    pub fn mul_assign(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        // Write each factor as i^{xz} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{z1 x2}.
        let mut k: i64 = i64::from(self.phase.0) + i64::from(other.phase.0);
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            k += i64::from((x1 & z1).count_ones())
                + i64::from((x2 & z2).count_ones())
                + 2 * i64::from((z1 & x2).count_ones())
                - i64::from((x3 & z3).count_ones());
            self.x[i] = x3;
            self.z[i] = z3;
        }
        self.phase = Phase(k.rem_euclid(4) as u8);
    }

    /// Multiplies the phase by `-1`.
    pub fn negate(&mut self) {
        self.phase = self.phase * Phase::MINUS_ONE;
    }

    fn flip_if(&mut self, cond: bool) {
        if cond {
            self.negate();
        }
    }

    // Conjugation by Clifford generators: P ↦ G P G†.

    pub fn conj_h(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        self.flip_if(x && z);
        Self::put(&mut self.x, q, z);
        Self::put(&mut self.z, q, x);
    }

    pub fn conj_s(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        self.flip_if(x && z);
        Self::put(&mut self.z, q, z ^ x);
    }

    pub fn conj_sdg(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        self.flip_if(x && !z);
        Self::put(&mut self.z, q, z ^ x);
    }

    pub fn conj_x(&mut self, q: usize) {
        let z = self.z_bit(q);
        self.flip_if(z);
    }

    pub fn conj_y(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        self.flip_if(x ^ z);
    }

    pub fn conj_z(&mut self, q: usize) {
        let x = self.x_bit(q);
        self.flip_if(x);
    }

    pub fn conj_cx(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x_bit(c), self.z_bit(c), self.x_bit(t), self.z_bit(t));
        self.flip_if(xc && zt && !(xt ^ zc));
        Self::put(&mut self.x, t, xt ^ xc);
        Self::put(&mut self.z, c, zc ^ zt);
    }

    pub fn conj_cz(&mut self, a: usize, b: usize) {
        self.conj_h(b);
        self.conj_cx(a, b);
        self.conj_h(b);
    }

    pub fn conj_swap(&mut self, a: usize, b: usize) {
        let (pa, pb) = (self.get(a), self.get(b));
        self.set(a, pb);
        self.set(b, pa);
    }

    /// Restricts to the listed qubits, producing a string over `qubits.len()` qubits.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out.phase = self.phase;
        out
    }

    /// Dense text form without the sign, leftmost character = highest qubit index.
    pub fn letters(&self) -> String {
        (0..self.n).rev().map(|q| self.get(q).as_char()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.letters())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Accepts an optional `+`, `-`, `+i`, `-i` or `i` prefix followed by `I/X/Y/Z` letters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PauliError::Parse(s.to_string());
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i'))
        {
            (Phase::I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::ONE, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else {
            (Phase::ONE, s)
        };
        let letters: Vec<char> = body.chars().collect();
        let n = letters.len();
        let mut out = PauliString::identity(n);
        for (pos, ch) in letters.iter().enumerate() {
            let p = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(err()),
            };
            out.set(n - 1 - pos, p);
        }
        out.phase = phase;
        Ok(out)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Iterates over all `4^n` Pauli strings on `n` qubits with phase `+1`.
pub fn all_paulis(n: usize) -> impl Iterator<Item = PauliString> {
    (0..4usize.pow(n as u32)).map(move |mut code| {
        let mut p = PauliString::identity(n);
        for q in 0..n {
            let letter = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][code % 4];
            p.set(q, letter);
            code /= 4;
        }
        p
    })
}
