//! The Steane [[7,1,3]] code: generators, the redundant 7+7 stabilizer set,
//! logical operators, syndromes and the ideal lookup decoder.
//!
//! Data qubits are register indices 0..7. All operators returned here live on
//! the full 14-qubit register so they compose directly with circuit frames.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Pauli, PauliString};
use crate::{DATA_MASK, NUM_DATA, REGISTER_QUBITS};

/// Supports of the three generators (rows of the Hamming parity-check
/// matrix), as masks over data qubits: {4,5,6,7}, {2,3,6,7}, {1,3,5,7}.
const GENERATOR_SUPPORTS: [u64; 3] = [0b111_1000, 0b110_0110, 0b101_0101];

/// Which Pauli type a stabilizer is made of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// Z-type stabilizers; they detect X (bit-flip) errors.
    Z,
    /// X-type stabilizers; they detect Z (phase-flip) errors.
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Redundancy {
    Generators,
    Redundant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicalClass {
    I,
    X,
    Z,
    Y,
}

impl LogicalClass {
    pub fn is_identity(self) -> bool {
        self == LogicalClass::I
    }
}

impl fmt::Display for LogicalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LogicalClass::I => "I",
            LogicalClass::X => "X",
            LogicalClass::Z => "Z",
            LogicalClass::Y => "Y",
        };
        f.write_str(s)
    }
}

/// Syndrome bits against one sector's generator or redundant set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Syndrome {
    pub sector: Sector,
    /// Bit `i` is the outcome against stabilizer `i`.
    pub bits: u8,
    pub len: u8,
}

impl Syndrome {
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }
}

impl std::ops::BitXor for Syndrome {
    type Output = Syndrome;

    fn bitxor(self, rhs: Self) -> Self {
        assert_eq!(
            (self.sector, self.len),
            (rhs.sector, rhs.len),
            "syndromes of different kinds"
        );
        Syndrome {
            bits: self.bits ^ rhs.bits,
            ..self
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("residual {0} has a nonzero syndrome; decode it before classifying")]
pub struct NotInNormalizer(pub PauliString);

/// Static description of the code.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    pub z_generators: [PauliString; 3],
    pub x_generators: [PauliString; 3],
    /// Generators first, then products in lexicographic subset order.
    pub z_redundant: [PauliString; 7],
    pub x_redundant: [PauliString; 7],
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    /// For each data qubit, the indices of the redundant stabilizers whose
    /// support contains it, ascending.
    pub support_table: [[usize; 4]; NUM_DATA],
    supports: [u64; 7],
    decoder: [PauliString; 64],
}

/// Builds the code. The result is cached; this is cheap to call repeatedly.
pub fn build_code() -> &'static CodeSpec {
    static CODE: OnceLock<CodeSpec> = OnceLock::new();
    CODE.get_or_init(CodeSpec::new)
}

fn redundant_supports() -> [u64; 7] {
    let [a, b, c] = GENERATOR_SUPPORTS;
    [a, b, c, a ^ b, a ^ c, b ^ c, a ^ b ^ c]
}

impl CodeSpec {
    fn new() -> Self {
        let n = REGISTER_QUBITS;
        let supports = redundant_supports();
        let z_of = |m: u64| PauliString::from_bits(n, 0, m);
        let x_of = |m: u64| PauliString::from_bits(n, m, 0);

        let mut support_table = [[0usize; 4]; NUM_DATA];
        for (q, row) in support_table.iter_mut().enumerate() {
            let hits: Vec<usize> = (0..7).filter(|&i| supports[i] >> q & 1 == 1).collect();
            row.copy_from_slice(&hits);
        }

        let mut code = Self {
            z_generators: GENERATOR_SUPPORTS.map(z_of),
            x_generators: GENERATOR_SUPPORTS.map(x_of),
            z_redundant: supports.map(z_of),
            x_redundant: supports.map(x_of),
            logical_x: x_of(DATA_MASK),
            logical_z: z_of(DATA_MASK),
            support_table,
            supports,
            decoder: [PauliString::identity(n); 64],
        };
        code.decoder = code.build_decoder();
        code
    }

    /// Lowest-weight correction for each (Z-sector, X-sector) generator
    /// syndrome pair, found by trying every X_a Z_b with a, b in {none, 0..7}.
    fn build_decoder(&self) -> [PauliString; 64] {
        let n = REGISTER_QUBITS;
        let mut table: [Option<PauliString>; 64] = [None; 64];
        let choices = || std::iter::once(None).chain((0..NUM_DATA).map(Some));
        for a in choices() {
            for b in choices() {
                let mut c = PauliString::identity(n);
                if let Some(a) = a {
                    c *= PauliString::single(n, a, Pauli::X);
                }
                if let Some(b) = b {
                    c *= PauliString::single(n, b, Pauli::Z);
                }
                let key = self.decoder_key(&c);
                match table[key] {
                    Some(prev) if prev.weight() <= c.weight() => {}
                    _ => table[key] = Some(c),
                }
            }
        }
        table.map(|c| c.expect("every syndrome pair is reachable by a weight-one correction"))
    }

    fn decoder_key(&self, e: &PauliString) -> usize {
        let sz = self.syndrome_of(e, Sector::Z, Redundancy::Generators).bits as usize;
        let sx = self.syndrome_of(e, Sector::X, Redundancy::Generators).bits as usize;
        sz | sx << 3
    }

    /// Data-qubit mask of redundant stabilizer `i`; shared by both sectors.
    pub fn support_mask(&self, i: usize) -> u64 {
        self.supports[i]
    }

    /// Data qubits of redundant stabilizer `i`, ascending.
    pub fn support(&self, i: usize) -> Vec<usize> {
        (0..NUM_DATA).filter(|&q| self.supports[i] >> q & 1 == 1).collect()
    }

    pub fn stabilizers(&self, sector: Sector, redundancy: Redundancy) -> &[PauliString] {
        match (sector, redundancy) {
            (Sector::Z, Redundancy::Generators) => &self.z_generators,
            (Sector::X, Redundancy::Generators) => &self.x_generators,
            (Sector::Z, Redundancy::Redundant) => &self.z_redundant,
            (Sector::X, Redundancy::Redundant) => &self.x_redundant,
        }
    }

    /// Anticommutation pattern of `e` against a stabilizer set.
    pub fn syndrome_of(&self, e: &PauliString, sector: Sector, redundancy: Redundancy) -> Syndrome {
        let stabs = self.stabilizers(sector, redundancy);
        let bits = stabs
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, s)| acc | e.symplectic(s) << i);
        Syndrome {
            sector,
            bits,
            len: stabs.len() as u8,
        }
    }

    /// Lowest-weight correction that clears the generator syndrome of `e`.
    pub fn ideal_decode(&self, e: &PauliString) -> PauliString {
        self.decoder[self.decoder_key(&e.restrict(DATA_MASK))]
    }

    /// Whether `e` (restricted to data) is in the stabilizer group.
    pub fn is_stabilizer(&self, e: &PauliString) -> bool {
        matches!(self.logical_class(e), Ok(LogicalClass::I))
    }

    /// Logical coset of a zero-syndrome data operator.
    pub fn logical_class(&self, e: &PauliString) -> Result<LogicalClass, NotInNormalizer> {
        let e = e.restrict(DATA_MASK);
        if self.decoder_key(&e) != 0 {
            return Err(NotInNormalizer(e));
        }
        let flips_z = e.symplectic(&self.logical_z) == 1;
        let flips_x = e.symplectic(&self.logical_x) == 1;
        Ok(match (flips_z, flips_x) {
            (false, false) => LogicalClass::I,
            (true, false) => LogicalClass::X,
            (false, true) => LogicalClass::Z,
            (true, true) => LogicalClass::Y,
        })
    }

    /// Decodes `e` ideally and returns the class of what is left.
    pub fn classify_residual(&self, e: &PauliString) -> (PauliString, LogicalClass) {
        let e = e.restrict(DATA_MASK);
        let corrected = e * self.ideal_decode(&e);
        let class = self
            .logical_class(&corrected)
            .expect("decoder output always clears the syndrome");
        (corrected, class)
    }
}
