//! Pauli operators modulo global phase, in binary symplectic form.
//!
//! A [`PauliString`] stores one X word and one Z word; qubit `q` carries X if
//! bit `q` of the X word is set, Z if bit `q` of the Z word is set, and Y if
//! both are. Products are XORs and commutation is the parity of the
//! symplectic form, so every group operation is a handful of word ops.
//!
//! Qubits are 0-indexed in the API. The text literal (`X1.Z8`) is 1-indexed
//! to match the circuit text format.

use std::fmt;
use std::ops::{Mul, MulAssign};
use std::str::FromStr;

use thiserror::Error;

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli modulo phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// `(x, z)` bits.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Pauli operator on `n` qubits, phase dropped.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

fn mask(n: usize) -> u64 {
    if n == MAX_QUBITS {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "register of {n} qubits exceeds {MAX_QUBITS}");
        Self { n: n as u8, x: 0, z: 0 }
    }

    /// Builds a string from raw bit words. Bits at or above `n` must be clear.
    pub fn from_bits(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= MAX_QUBITS, "register of {n} qubits exceeds {MAX_QUBITS}");
        assert!((x | z) & !mask(n) == 0, "bits set outside a {n}-qubit register");
        Self { n: n as u8, x, z }
    }

    pub fn single(n: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut p = Self::identity(n);
        p.set(qubit, pauli);
        p
    }

    /// Same Pauli on every listed qubit.
    pub fn uniform(n: usize, qubits: impl IntoIterator<Item = usize>, pauli: Pauli) -> Self {
        let mut p = Self::identity(n);
        for q in qubits {
            p.set(q, pauli);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// Qubits acted on non-trivially, as a bit mask.
    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.support_mask();
        (0..self.num_qubits()).filter(move |&q| m >> q & 1 == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.num_qubits(), "qubit {qubit} out of range");
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, pauli: Pauli) {
        assert!(qubit < self.num_qubits(), "qubit {qubit} out of range");
        let (x, z) = pauli.bits();
        let bit = 1u64 << qubit;
        self.x = (self.x & !bit) | if x { bit } else { 0 };
        self.z = (self.z & !bit) | if z { bit } else { 0 };
    }

    /// Keeps only the qubits in `mask`.
    pub fn restrict(&self, mask: u64) -> Self {
        Self {
            n: self.n,
            x: self.x & mask,
            z: self.z & mask,
        }
    }

    /// Pauli product modulo phase.
    pub fn multiply(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "Pauli strings on different register sizes");
        Self {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// Symplectic form: 1 iff the operators anticommute.
    pub fn symplectic(&self, other: &Self) -> u8 {
        assert_eq!(self.n, other.n, "Pauli strings on different register sizes");
        (((self.x & other.z) ^ (self.z & other.x)).count_ones() & 1) as u8
    }

    pub fn commutes(&self, other: &Self) -> bool {
        self.symplectic(other) == 0
    }

    /// Widens or narrows the register, keeping the low qubits.
    pub fn resize(&self, n: usize) -> Self {
        Self::from_bits(n, self.x & mask(n), self.z & mask(n))
    }

    /// Writes the 1-indexed literal, `I` for the identity.
    fn write_literal(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for q in self.support() {
            if !first {
                f.write_str(".")?;
            }
            first = false;
            write!(f, "{}{}", self.get(q).symbol(), q + 1)?;
        }
        Ok(())
    }

    /// Parses a literal such as `Z1.Z2.Y9` on an `n`-qubit register.
    pub fn parse(n: usize, literal: &str) -> Result<Self, PauliParseError> {
        let literal = literal.trim();
        let mut p = Self::identity(n);
        if literal == "I" {
            return Ok(p);
        }
        if literal.is_empty() {
            return Err(PauliParseError::Empty);
        }
        for token in literal.split('.') {
            let mut chars = token.chars();
            let pauli = match chars.next() {
                Some('X') => Pauli::X,
                Some('Y') => Pauli::Y,
                Some('Z') => Pauli::Z,
                _ => return Err(PauliParseError::BadFactor(token.to_string())),
            };
            let index: usize = chars
                .as_str()
                .parse()
                .map_err(|_| PauliParseError::BadFactor(token.to_string()))?;
            if index == 0 || index > n {
                return Err(PauliParseError::QubitOutOfRange { index, n });
            }
            if p.get(index - 1) != Pauli::I {
                return Err(PauliParseError::RepeatedQubit(index));
            }
            p.set(index - 1, pauli);
        }
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_literal(f)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString[{}](", self.n)?;
        self.write_literal(f)?;
        f.write_str(")")
    }
}

impl Mul for PauliString {
    type Output = PauliString;

    fn mul(self, rhs: Self) -> Self {
        self.multiply(&rhs)
    }
}

impl MulAssign for PauliString {
    fn mul_assign(&mut self, rhs: Self) {
        *self = self.multiply(&rhs);
    }
}

impl FromStr for PauliString {
    type Err = PauliParseError;

    /// Parses onto the full 14-qubit register.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(crate::REGISTER_QUBITS, s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliParseError {
    #[error("empty Pauli literal")]
    Empty,
    #[error("malformed Pauli factor `{0}`")]
    BadFactor(String),
    #[error("qubit {index} outside 1..={n}")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("qubit {0} appears twice")]
    RepeatedQubit(usize),
}

/// The Clifford gates faults are pushed through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clifford {
    H(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    /// `|0><0| ⊗ I + |1><1| ⊗ body`; `body` must not touch `control`.
    ControlledPauli {
        control: usize,
        body: PauliString,
    },
}

impl Clifford {
    /// Returns `g P g†` modulo phase.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        let (x, z) = self.conjugate_bits(p.x, p.z);
        PauliString { n: p.n, x, z }
    }

    /// Word-level form of [`Clifford::conjugate`] used by the engine.
    #[inline]
    pub fn conjugate_bits(&self, mut x: u64, mut z: u64) -> (u64, u64) {
        match *self {
            Clifford::H(q) => {
                let b = 1u64 << q;
                let (xq, zq) = (x & b, z & b);
                x = (x & !b) | zq;
                z = (z & !b) | xq;
            }
            Clifford::Cnot { control, target } => {
                x ^= (x >> control & 1) << target;
                z ^= (z >> target & 1) << control;
            }
            Clifford::ControlledPauli { control, body } => {
                let anti = ((x & body.z) ^ (z & body.x)).count_ones() & 1;
                if x >> control & 1 == 1 {
                    x ^= body.x;
                    z ^= body.z;
                }
                z ^= (anti as u64) << control;
            }
        }
        (x, z)
    }

    /// Qubits the gate touches, control first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Clifford::H(q) => vec![q],
            Clifford::Cnot { control, target } => vec![control, target],
            Clifford::ControlledPauli { control, body } => std::iter::once(control).chain(body.support()).collect(),
        }
    }
}

/// Returns `g P g†` for a circuit gate.
///
/// Only the Clifford kinds (H, CNOT, controlled Pauli string) are accepted;
/// classically controlled corrections and preparations have no conjugation
/// action and are handled by the engine.
pub fn conjugate_through(p: &PauliString, gate: &crate::circuit::GateOp) -> Result<PauliString, NotClifford> {
    gate.clifford().map(|g| g.conjugate(p)).ok_or(NotClifford(gate.kind))
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("{0:?} gates have no Pauli conjugation rule")]
pub struct NotClifford(pub crate::circuit::GateKind);
