//! Timed gate IR, the two error-correction round builders, and fault
//! location enumeration.
//!
//! A round has four quarters: extract bit-flip syndromes into the seven
//! ancillas, correct them with 4-controlled X gates, then repeat both for
//! phase flips inside a transversal Hadamard sandwich on the data. Ancillas
//! are reset after each correction quarter.
//!
//! * [`build_fig1`] extracts each redundant Z stabilizer with four CNOTs
//!   from the data (controls) onto its ancilla (target).
//! * [`build_fig2`] extracts each stabilizer with a single controlled Pauli
//!   string whose control is the ancilla, prepared in |+> by a Hadamard.

mod schedule;
pub mod text;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Clifford, Pauli, PauliString};
use crate::steane::build_code;
use crate::{ancilla, DATA_MASK, NUM_ANCILLA, NUM_DATA, REGISTER_QUBITS};
use schedule::Scheduler;

pub use text::{export_text, import_text, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "PREP0")]
    Prep0,
    H,
    #[serde(rename = "CNOT")]
    Cnot,
    /// Single-control Pauli string (ancilla control, stabilizer body on data).
    #[serde(rename = "CPSTRING")]
    CPString,
    /// X on the target iff every control is |1>; controls are ancillas in
    /// computational-basis states, so the action resolves classically.
    #[serde(rename = "CKX_CLASSICAL")]
    CkxClassical,
    #[serde(rename = "RESET")]
    Reset,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::Prep0,
        GateKind::H,
        GateKind::Cnot,
        GateKind::CPString,
        GateKind::CkxClassical,
        GateKind::Reset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Prep0 => "PREP0",
            GateKind::H => "H",
            GateKind::Cnot => "CNOT",
            GateKind::CPString => "CPSTRING",
            GateKind::CkxClassical => "CKX_CLASSICAL",
            GateKind::Reset => "RESET",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate instance. Qubits are 0-indexed register positions, controls first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub body: Option<PauliString>,
    pub timestep: usize,
}

impl GateOp {
    pub fn prep0(q: usize) -> Self {
        Self {
            kind: GateKind::Prep0,
            qubits: vec![q],
            body: None,
            timestep: 0,
        }
    }

    pub fn reset(q: usize) -> Self {
        Self {
            kind: GateKind::Reset,
            qubits: vec![q],
            body: None,
            timestep: 0,
        }
    }

    pub fn h(q: usize) -> Self {
        Self {
            kind: GateKind::H,
            qubits: vec![q],
            body: None,
            timestep: 0,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            qubits: vec![control, target],
            body: None,
            timestep: 0,
        }
    }

    pub fn cpstring(control: usize, body: PauliString) -> Self {
        let qubits = std::iter::once(control).chain(body.support()).collect();
        Self {
            kind: GateKind::CPString,
            qubits,
            body: Some(body),
            timestep: 0,
        }
    }

    pub fn ckx(controls: [usize; 4], target: usize) -> Self {
        let qubits = controls.iter().copied().chain(std::iter::once(target)).collect();
        Self {
            kind: GateKind::CkxClassical,
            qubits,
            body: None,
            timestep: 0,
        }
    }

    pub fn at(mut self, timestep: usize) -> Self {
        self.timestep = timestep;
        self
    }

    /// Conjugation form of the gate, if it is one of the Clifford kinds.
    pub fn clifford(&self) -> Option<Clifford> {
        match self.kind {
            GateKind::H => Some(Clifford::H(self.qubits[0])),
            GateKind::Cnot => Some(Clifford::Cnot {
                control: self.qubits[0],
                target: self.qubits[1],
            }),
            GateKind::CPString => Some(Clifford::ControlledPauli {
                control: self.qubits[0],
                body: self.body.expect("CPSTRING carries a body"),
            }),
            _ => None,
        }
    }

    pub fn qubit_mask(&self) -> u64 {
        self.qubits.iter().fold(0, |m, &q| m | 1 << q)
    }

    fn validate(&self) -> Result<(), CircuitError> {
        let bad = |why: &str| {
            Err(CircuitError::BadGate(format!(
                "{} at t={}: {why}",
                self.kind, self.timestep
            )))
        };
        if self.qubits.iter().any(|&q| q >= REGISTER_QUBITS) {
            return bad("qubit outside the register");
        }
        if self.qubit_mask().count_ones() as usize != self.qubits.len() {
            return bad("repeated qubit");
        }
        match self.kind {
            GateKind::Prep0 | GateKind::Reset | GateKind::H if self.qubits.len() != 1 => bad("expects one qubit"),
            GateKind::Cnot if self.qubits.len() != 2 => bad("expects two qubits"),
            GateKind::CPString => match self.body {
                None => bad("missing body"),
                Some(body) => {
                    let expected: Vec<usize> = std::iter::once(self.qubits[0]).chain(body.support()).collect();
                    if body.is_identity() || expected != self.qubits {
                        bad("qubits must be the control followed by the body support")
                    } else {
                        Ok(())
                    }
                }
            },
            GateKind::CkxClassical if self.qubits.len() != 5 => bad("expects four controls and a target"),
            _ if self.kind != GateKind::CPString && self.body.is_some() => bad("only CPSTRING takes a body"),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitLabel {
    Fig1,
    Fig2,
    Custom,
}

impl CircuitLabel {
    pub fn name(self) -> &'static str {
        match self {
            CircuitLabel::Fig1 => "fig1",
            CircuitLabel::Fig2 => "fig2",
            CircuitLabel::Custom => "custom",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [CircuitLabel::Fig1, CircuitLabel::Fig2, CircuitLabel::Custom]
            .into_iter()
            .find(|l| l.name() == s)
    }
}

impl fmt::Display for CircuitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("malformed gate: {0}")]
    BadGate(String),
    #[error("qubit {qubit} is used twice at timestep {timestep}")]
    DoubleBooked { qubit: usize, timestep: usize },
}

/// A scheduled error-correction round on 7 data + 7 ancilla qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub label: CircuitLabel,
    gates: Vec<GateOp>,
    depth: usize,
}

impl Circuit {
    pub const N_DATA: usize = NUM_DATA;
    pub const N_ANCILLA: usize = NUM_ANCILLA;

    /// Validates and sorts gates by timestep (stable within a timestep).
    pub fn from_gates(label: CircuitLabel, mut gates: Vec<GateOp>) -> Result<Self, CircuitError> {
        for g in &gates {
            g.validate()?;
        }
        gates.sort_by_key(|g| g.timestep);
        let mut used: BTreeMap<usize, u64> = BTreeMap::new();
        for g in &gates {
            let slot = used.entry(g.timestep).or_default();
            let clash = *slot & g.qubit_mask();
            if clash != 0 {
                return Err(CircuitError::DoubleBooked {
                    qubit: clash.trailing_zeros() as usize,
                    timestep: g.timestep,
                });
            }
            *slot |= g.qubit_mask();
        }
        let depth = gates.last().map_or(0, |g| g.timestep + 1);
        Ok(Self { label, gates, depth })
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_qubits(&self) -> usize {
        REGISTER_QUBITS
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    pub fn stats(&self) -> CircuitStats {
        let locations = enumerate_locations(self);
        let idle = locations.iter().filter(|l| l.kind == LocationKind::Idle).count();
        CircuitStats {
            circuit: self.label,
            depth: self.depth,
            gates: GateKind::ALL
                .iter()
                .map(|&k| (k.name().to_string(), self.count(k)))
                .collect(),
            total_gates: self.gates.len(),
            idle_locations: idle,
            total_locations: locations.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitStats {
    pub circuit: CircuitLabel,
    pub depth: usize,
    pub gates: BTreeMap<String, usize>,
    pub total_gates: usize,
    pub idle_locations: usize,
    pub total_locations: usize,
}

/// Extraction gadget for one stabilizer.
#[derive(Clone, Copy)]
enum Extraction {
    /// Data controls, ancilla target, one CNOT per support qubit.
    Cnots,
    /// Ancilla in |+> controls the whole Z string in one gate.
    Kickback,
}

fn correction_chains() -> Vec<Vec<GateOp>> {
    let code = build_code();
    (0..NUM_DATA)
        .map(|q| vec![GateOp::ckx(code.support_table[q].map(ancilla), q)])
        .collect()
}

fn singles(qubits: impl Iterator<Item = usize>, make: fn(usize) -> GateOp) -> Vec<Vec<GateOp>> {
    qubits.map(|q| vec![make(q)]).collect()
}

fn extraction_chains(style: Extraction, prepare: bool) -> Vec<Vec<GateOp>> {
    let code = build_code();
    (0..7)
        .map(|i| {
            let a = ancilla(i);
            let mut chain = Vec::new();
            if prepare {
                chain.push(GateOp::prep0(a));
            }
            match style {
                Extraction::Cnots => {
                    chain.extend(code.support(i).into_iter().map(|d| GateOp::cnot(d, a)));
                }
                Extraction::Kickback => {
                    let body = PauliString::uniform(REGISTER_QUBITS, code.support(i), Pauli::Z);
                    chain.push(GateOp::h(a));
                    chain.push(GateOp::cpstring(a, body));
                    chain.push(GateOp::h(a));
                }
            }
            chain
        })
        .collect()
}

fn build_round(label: CircuitLabel, style: Extraction) -> Circuit {
    let data = || 0..NUM_DATA;
    let ancillas = || (0..NUM_ANCILLA).map(ancilla);
    let mut s = Scheduler::default();
    // bit-flip half
    s.segment(extraction_chains(style, true));
    s.segment(correction_chains());
    s.segment(singles(ancillas(), GateOp::reset));
    // phase-flip half, rotated into bit flips by the Hadamard sandwich
    s.segment(singles(data(), GateOp::h));
    s.segment(extraction_chains(style, false));
    s.segment(correction_chains());
    s.segment(singles(data(), GateOp::h));
    s.segment(singles(ancillas(), GateOp::reset));
    Circuit::from_gates(label, s.run(REGISTER_QUBITS)).expect("builder emits a valid schedule")
}

/// Round with CNOT-based redundant syndrome extraction.
pub fn build_fig1() -> Circuit {
    build_round(CircuitLabel::Fig1, Extraction::Cnots)
}

/// Round that extracts each stabilizer in one controlled-Pauli-string step.
pub fn build_fig2() -> Circuit {
    build_round(CircuitLabel::Fig2, Extraction::Kickback)
}

pub fn build(label: CircuitLabel) -> Option<Circuit> {
    match label {
        CircuitLabel::Fig1 => Some(build_fig1()),
        CircuitLabel::Fig2 => Some(build_fig2()),
        CircuitLabel::Custom => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocationKind {
    Gate,
    Idle,
}

/// A place where a fault can occur: after a gate, or on an idle qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaultLocation {
    pub id: usize,
    pub kind: LocationKind,
    pub timestep: usize,
    /// 0-indexed register qubits, in gate order for gate locations.
    pub support: Vec<usize>,
    pub gate_kind: Option<GateKind>,
    /// Index into [`Circuit::gates`] for gate locations.
    pub gate_index: Option<usize>,
}

impl FaultLocation {
    pub fn support_mask(&self) -> u64 {
        self.support.iter().fold(0, |m, &q| m | 1 << q)
    }

    pub fn data_weight(&self) -> usize {
        (self.support_mask() & DATA_MASK).count_ones() as usize
    }
}

/// Every gate and idle location, ordered by timestep, then gates in circuit
/// order, then idle qubits ascending. Ids are positions in that order.
pub fn enumerate_locations(c: &Circuit) -> Vec<FaultLocation> {
    let mut out = Vec::new();
    for t in 0..c.depth() {
        let mut busy = 0u64;
        for (i, g) in c.gates().iter().enumerate().filter(|(_, g)| g.timestep == t) {
            busy |= g.qubit_mask();
            out.push(FaultLocation {
                id: out.len(),
                kind: LocationKind::Gate,
                timestep: t,
                support: g.qubits.clone(),
                gate_kind: Some(g.kind),
                gate_index: Some(i),
            });
        }
        for q in (0..REGISTER_QUBITS).filter(|q| busy >> q & 1 == 0) {
            out.push(FaultLocation {
                id: out.len(),
                kind: LocationKind::Idle,
                timestep: t,
                support: vec![q],
                gate_kind: None,
                gate_index: None,
            });
        }
    }
    out
}
