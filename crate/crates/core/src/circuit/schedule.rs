//! Greedy as-soon-as-possible packing of gate chains into timesteps.
//!
//! Work is handed over as segments of chains. Gates inside a chain keep their
//! order. Chains inside a segment commute with each other and only compete
//! for qubits. A gate may not start while any gate of an earlier segment that
//! touches one of its qubits is still unscheduled.

use super::GateOp;

#[derive(Default)]
pub(crate) struct Scheduler {
    segments: Vec<Vec<Vec<GateOp>>>,
}

impl Scheduler {
    pub(crate) fn segment(&mut self, chains: Vec<Vec<GateOp>>) {
        self.segments
            .push(chains.into_iter().filter(|c| !c.is_empty()).collect());
    }

    /// Returns every gate with its timestep set, ordered by (timestep, priority).
    pub(crate) fn run(self, num_qubits: usize) -> Vec<GateOp> {
        struct Chain {
            segment: usize,
            gates: Vec<GateOp>,
            next: usize,
            free_at: usize,
        }

        let mut chains: Vec<Chain> = self
            .segments
            .into_iter()
            .enumerate()
            .flat_map(|(segment, chains)| {
                chains.into_iter().map(move |gates| Chain {
                    segment,
                    gates,
                    next: 0,
                    free_at: 0,
                })
            })
            .collect();

        let num_segments = chains.iter().map(|c| c.segment + 1).max().unwrap_or(0);
        // pending[s][q]: unscheduled gates of segment s touching qubit q
        let mut pending = vec![vec![0usize; num_qubits]; num_segments];
        for chain in &chains {
            for g in &chain.gates {
                for &q in &g.qubits {
                    pending[chain.segment][q] += 1;
                }
            }
        }

        let total: usize = chains.iter().map(|c| c.gates.len()).sum();
        let mut out = Vec::with_capacity(total);
        let mut qubit_free_at = vec![0usize; num_qubits];
        let mut t = 0;
        while out.len() < total {
            for chain in chains.iter_mut() {
                if chain.next == chain.gates.len() || chain.free_at > t {
                    continue;
                }
                let gate = &chain.gates[chain.next];
                let ready = gate
                    .qubits
                    .iter()
                    .all(|&q| qubit_free_at[q] <= t && pending[..chain.segment].iter().all(|s| s[q] == 0));
                if !ready {
                    continue;
                }
                let mut gate = gate.clone();
                gate.timestep = t;
                for &q in &gate.qubits {
                    qubit_free_at[q] = t + 1;
                    pending[chain.segment][q] -= 1;
                }
                chain.next += 1;
                chain.free_at = t + 1;
                out.push(gate);
            }
            t += 1;
        }
        out
    }
}
