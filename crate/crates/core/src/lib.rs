//! Fault-propagation simulator for measurement-free (coherent) error
//! correction on the Steane [[7,1,3]] code.
//!
//! The register has 14 qubits: data at indices 0..7 and ancillas at 7..14
//! (1-indexed as 1-7 and 8-14 in every text format). One error-correction
//! round is built by [`circuit`], faults are drawn or enumerated by
//! [`noise`], pushed through the round by [`engine`], and aggregated into
//! logical error rates, fault censuses and thresholds by [`analysis`].

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod engine;
pub mod noise;
pub mod pauli;
pub mod steane;

pub use circuit::{build_fig1, build_fig2, Circuit, CircuitLabel, FaultLocation, GateKind, GateOp};
pub use engine::{run_round, trace_round, Engine, RoundOutcome};
pub use noise::{AncillaChannel, ErrorModel, FaultEvent, GateNoise};
pub use pauli::{Pauli, PauliString};
pub use steane::{build_code, CodeSpec, LogicalClass};

pub const NUM_DATA: usize = 7;
pub const NUM_ANCILLA: usize = 7;
pub const REGISTER_QUBITS: usize = NUM_DATA + NUM_ANCILLA;
pub const DATA_MASK: u64 = (1 << NUM_DATA) - 1;
pub const ANCILLA_MASK: u64 = ((1 << NUM_ANCILLA) - 1) << NUM_DATA;

/// Register index of the ancilla holding redundant stabilizer `i`.
pub const fn ancilla(i: usize) -> usize {
    NUM_DATA + i
}
