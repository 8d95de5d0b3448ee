//! Pauli-frame execution of one error-correction round.
//!
//! The frame is the Pauli relating the faulty state to the noiseless
//! reference run. Clifford gates conjugate it. The 4-controlled corrections
//! are resolved from the frame's X bits on their controls: in the reference
//! run every ancilla holds |0> at correction time, so the actual control bits
//! are exactly those X bits, and the gate applies X to its target iff all four
//! are set. Preparations and resets clear the frame on their qubit. Faults are
//! multiplied in after the gates of their timestep.

use thiserror::Error;

use crate::circuit::{Circuit, GateKind};
use crate::noise::FaultEvent;
use crate::pauli::{Clifford, PauliString};
use crate::steane::{build_code, LogicalClass};
use crate::{DATA_MASK, REGISTER_QUBITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("no fault location with id {0}")]
    UnknownLocation(usize),
    #[error("fault {pauli} acts outside location {location}")]
    OutsideLocation { location: usize, pauli: PauliString },
    #[error("injected error {0} touches ancilla qubits")]
    InjectOnAncilla(PauliString),
}

/// Frame at a point in the round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameState {
    pub frame: PauliString,
    pub cursor: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundOutcome {
    /// Data part of the final frame, before ideal decoding.
    pub residual: PauliString,
    pub cls: LogicalClass,
    pub failed: bool,
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Clifford(Clifford),
    Ckx { controls: u64, target: u64 },
    Clear(u64),
}

/// A circuit compiled for repeated frame simulation.
#[derive(Clone, Debug)]
pub struct Engine {
    ops: Vec<Op>,
    /// `ops[step_start[t]..step_start[t + 1]]` run at timestep `t`.
    step_start: Vec<usize>,
    location_step: Vec<usize>,
    location_mask: Vec<u64>,
    depth: usize,
}

impl Engine {
    pub fn new(c: &Circuit) -> Self {
        let mut ops = Vec::with_capacity(c.gates().len());
        let mut step_start = vec![0; c.depth() + 1];
        for g in c.gates() {
            let op = match g.kind {
                GateKind::H | GateKind::Cnot | GateKind::CPString => Op::Clifford(g.clifford().expect("Clifford kind")),
                GateKind::CkxClassical => Op::Ckx {
                    controls: g.qubits[..4].iter().fold(0, |m, &q| m | 1 << q),
                    target: 1 << g.qubits[4],
                },
                GateKind::Prep0 | GateKind::Reset => Op::Clear(1 << g.qubits[0]),
            };
            ops.push(op);
            step_start[g.timestep + 1] = ops.len();
        }
        for t in 1..step_start.len() {
            step_start[t] = step_start[t].max(step_start[t - 1]);
        }
        let locations = crate::circuit::enumerate_locations(c);
        Self {
            ops,
            step_start,
            location_step: locations.iter().map(|l| l.timestep).collect(),
            location_mask: locations.iter().map(|l| l.support_mask()).collect(),
            depth: c.depth(),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_locations(&self) -> usize {
        self.location_step.len()
    }

    fn check(&self, faults: &[FaultEvent], inject: Option<PauliString>) -> Result<(), EngineError> {
        for f in faults {
            let mask = *self
                .location_mask
                .get(f.location)
                .ok_or(EngineError::UnknownLocation(f.location))?;
            if f.pauli.support_mask() & !mask != 0 {
                return Err(EngineError::OutsideLocation {
                    location: f.location,
                    pauli: f.pauli,
                });
            }
        }
        match inject {
            Some(p) if p.support_mask() & !DATA_MASK != 0 => Err(EngineError::InjectOnAncilla(p)),
            _ => Ok(()),
        }
    }

    #[inline]
    fn apply_step(&self, t: usize, x: &mut u64, z: &mut u64) {
        for op in &self.ops[self.step_start[t]..self.step_start[t + 1]] {
            match *op {
                Op::Clifford(g) => {
                    let (nx, nz) = g.conjugate_bits(*x, *z);
                    *x = nx;
                    *z = nz;
                }
                Op::Ckx { controls, target } => {
                    if *x & controls == controls {
                        *x ^= target;
                    }
                }
                Op::Clear(m) => {
                    *x &= !m;
                    *z &= !m;
                }
            }
        }
    }

    /// Runs the round, calling `visit` with the frame at the start of every
    /// timestep from `first` on and once more at the end.
    fn simulate(
        &self,
        faults: &[FaultEvent],
        inject: Option<PauliString>,
        mut visit: impl FnMut(usize, u64, u64),
    ) -> (u64, u64) {
        let step = |f: &FaultEvent| self.location_step[f.location];
        let sorted;
        let faults = if faults.windows(2).all(|w| step(&w[0]) <= step(&w[1])) {
            faults
        } else {
            sorted = {
                let mut v = faults.to_vec();
                v.sort_by_key(step);
                v
            };
            &sorted[..]
        };
        let (mut x, mut z) = inject.map_or((0, 0), |p| (p.x_bits(), p.z_bits()));
        let first = match (inject, faults.first()) {
            (Some(_), _) => 0,
            (None, Some(f)) => step(f),
            (None, None) => self.depth,
        };
        let mut next = 0;
        for t in first..self.depth {
            visit(t, x, z);
            self.apply_step(t, &mut x, &mut z);
            while next < faults.len() && step(&faults[next]) == t {
                x ^= faults[next].pauli.x_bits();
                z ^= faults[next].pauli.z_bits();
                next += 1;
            }
        }
        visit(self.depth, x, z);
        (x, z)
    }

    pub fn run(&self, faults: &[FaultEvent], inject: Option<PauliString>) -> Result<RoundOutcome, EngineError> {
        self.check(faults, inject)?;
        Ok(self.run_unchecked(faults, inject))
    }

    /// [`Engine::run`] without validating fault locations.
    pub fn run_unchecked(&self, faults: &[FaultEvent], inject: Option<PauliString>) -> RoundOutcome {
        let (x, z) = self.simulate(faults, inject, |_, _, _| {});
        let residual = PauliString::from_bits(REGISTER_QUBITS, x & DATA_MASK, z & DATA_MASK);
        let (_, cls) = build_code().classify_residual(&residual);
        RoundOutcome {
            residual,
            cls,
            failed: !cls.is_identity(),
        }
    }

    /// Frame at the start of every timestep plus the final frame
    /// (`depth + 1` snapshots).
    pub fn trace(&self, faults: &[FaultEvent], inject: Option<PauliString>) -> Result<Vec<FrameState>, EngineError> {
        self.check(faults, inject)?;
        let mut out = Vec::with_capacity(self.depth + 1);
        let initial = inject.unwrap_or_else(|| PauliString::identity(REGISTER_QUBITS));
        self.simulate(faults, inject, |t, x, z| {
            while out.len() < t {
                out.push(FrameState {
                    frame: initial,
                    cursor: out.len(),
                });
            }
            out.push(FrameState {
                frame: PauliString::from_bits(REGISTER_QUBITS, x, z),
                cursor: t,
            });
        });
        Ok(out)
    }

    /// Frame at the start of timestep `t`; its ancilla X bits are what
    /// corrections running at `t` read.
    pub fn frame_before(&self, t: usize, faults: &[FaultEvent], inject: Option<PauliString>) -> PauliString {
        let mut snap = PauliString::identity(REGISTER_QUBITS);
        self.simulate(faults, inject, |s, x, z| {
            if s == t {
                snap = PauliString::from_bits(REGISTER_QUBITS, x, z);
            }
        });
        snap
    }
}

/// One round under the given faults and optional pre-round data error.
pub fn run_round(c: &Circuit, faults: &[FaultEvent], inject: Option<PauliString>) -> Result<RoundOutcome, EngineError> {
    Engine::new(c).run(faults, inject)
}

pub fn trace_round(
    c: &Circuit,
    faults: &[FaultEvent],
    inject: Option<PauliString>,
) -> Result<Vec<FrameState>, EngineError> {
    Engine::new(c).trace(faults, inject)
}

/// `t=<step> frame=<pauli>` lines.
pub fn format_trace(trace: &[FrameState]) -> String {
    trace
        .iter()
        .map(|s| format!("t={} frame={}\n", s.cursor, s.frame))
        .collect()
}
