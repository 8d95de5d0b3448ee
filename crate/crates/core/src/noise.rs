//! Circuit-level stochastic Pauli noise.
//!
//! Every fault location (gate or idle qubit) fails independently with the
//! same probability `p`; a failing location applies a Pauli drawn uniformly
//! from its admissible nontrivial Paulis, after the gate. The admissible set
//! depends on the ancilla channel (full, or bit-flip-only on ancillas) and on
//! how gates wider than two qubits are modelled ([`GateNoise`]).

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{enumerate_locations, Circuit, FaultLocation, GateKind, LocationKind};
use crate::pauli::{Pauli, PauliString};
use crate::{ANCILLA_MASK, DATA_MASK, REGISTER_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AncillaChannel {
    /// Depolarizing on ancillas like everywhere else.
    Full,
    /// Ancillas only suffer X; any option with a Z component on an ancilla is
    /// removed and the remainder drawn uniformly.
    BitflipOnly,
}

impl AncillaChannel {
    pub fn name(self) -> &'static str {
        match self {
            AncillaChannel::Full => "full",
            AncillaChannel::BitflipOnly => "bitflip-ancilla",
        }
    }
}

impl fmt::Display for AncillaChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fault model for gates acting on three or more qubits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateNoise {
    /// Uniform over nontrivial Paulis on the gate support that touch at most
    /// one data qubit. Only the controlled-Pauli-string gate is affected; every
    /// other gate has at most one data qubit in its support.
    #[default]
    DataLocal,
    /// Uniform over all `4^k - 1` nontrivial Paulis on the support.
    Uniform,
    /// Each qubit of the gate is its own single-qubit depolarizing site.
    PerQubit,
}

impl GateNoise {
    pub fn name(self) -> &'static str {
        match self {
            GateNoise::DataLocal => "data-local",
            GateNoise::Uniform => "uniform",
            GateNoise::PerQubit => "per-qubit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    /// Failure probability of every location, gate and idle alike.
    pub p: f64,
    pub ancilla_channel: AncillaChannel,
    #[serde(default)]
    pub gate_noise: GateNoise,
}

impl ErrorModel {
    pub fn new(p: f64, ancilla_channel: AncillaChannel) -> Self {
        assert!((0.0..=1.0).contains(&p), "p = {p} is not a probability");
        Self {
            p,
            ancilla_channel,
            gate_noise: GateNoise::default(),
        }
    }

    pub fn with_gate_noise(mut self, gate_noise: GateNoise) -> Self {
        self.gate_noise = gate_noise;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "p = {p} is not a probability");
        self.p = p;
        self
    }
}

/// A concrete Pauli applied right after a location's gate (or idle step).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaultEvent {
    pub location: usize,
    pub pauli: PauliString,
}

/// An independent failure channel: usually a whole location, one qubit of a
/// gate under [`GateNoise::PerQubit`].
#[derive(Clone, Debug)]
pub struct NoiseSite {
    pub location: usize,
    pub timestep: usize,
    pub kind: LocationKind,
    pub gate_kind: Option<GateKind>,
    pub qubits: Vec<usize>,
    pub admissible: Vec<PauliString>,
}

impl NoiseSite {
    /// True for idles and single-qubit gates.
    pub fn is_single_qubit(&self) -> bool {
        self.qubits.len() == 1
    }
}

/// Every nontrivial Pauli on `qubits`, in base-4 counter order with the first
/// qubit least significant and I, X, Y, Z per digit.
fn all_paulis_on(qubits: &[usize]) -> impl Iterator<Item = PauliString> + '_ {
    let digits = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (1u32..(1 << (2 * qubits.len()))).map(move |code| {
        let mut p = PauliString::identity(REGISTER_QUBITS);
        for (k, &q) in qubits.iter().enumerate() {
            p.set(q, digits[(code >> (2 * k) & 3) as usize]);
        }
        p
    })
}

fn admissible(qubits: &[usize], channel: AncillaChannel, data_local: bool) -> Vec<PauliString> {
    all_paulis_on(qubits)
        .filter(|p| channel == AncillaChannel::Full || p.z_bits() & ANCILLA_MASK == 0)
        .filter(|p| !data_local || (p.support_mask() & DATA_MASK).count_ones() <= 1)
        .collect()
}

fn sites_for(loc: &FaultLocation, m: &ErrorModel) -> Vec<NoiseSite> {
    let site = |qubits: Vec<usize>, admissible| NoiseSite {
        location: loc.id,
        timestep: loc.timestep,
        kind: loc.kind,
        gate_kind: loc.gate_kind,
        qubits,
        admissible,
    };
    let wide = loc.support.len() > 2;
    match m.gate_noise {
        GateNoise::PerQubit if wide => loc
            .support
            .iter()
            .map(|&q| site(vec![q], admissible(&[q], m.ancilla_channel, false)))
            .collect(),
        GateNoise::DataLocal if wide => {
            vec![site(
                loc.support.clone(),
                admissible(&loc.support, m.ancilla_channel, true),
            )]
        }
        _ => vec![site(
            loc.support.clone(),
            admissible(&loc.support, m.ancilla_channel, false),
        )],
    }
}

/// Noise sites of a circuit under a model's channel choices (not `p`).
#[derive(Clone, Debug)]
pub struct NoiseSites {
    pub locations: Vec<FaultLocation>,
    pub sites: Vec<NoiseSite>,
}

impl NoiseSites {
    pub fn new(c: &Circuit, m: &ErrorModel) -> Self {
        let locations = enumerate_locations(c);
        let sites = locations.iter().flat_map(|l| sites_for(l, m)).collect();
        Self { locations, sites }
    }

    pub fn num_events(&self) -> usize {
        self.sites.iter().map(|s| s.admissible.len()).sum()
    }

    /// Every (site, admissible Pauli) pair once, in site order.
    pub fn single_faults(&self) -> impl Iterator<Item = FaultEvent> + '_ {
        self.sites.iter().flat_map(|s| {
            s.admissible.iter().map(move |&pauli| FaultEvent {
                location: s.location,
                pauli,
            })
        })
    }

    /// Number of unordered pairs of distinct sites.
    pub fn num_site_pairs(&self) -> u64 {
        let n = self.sites.len() as u64;
        n * n.saturating_sub(1) / 2
    }
}

/// Per-shot fault sampler. Skips between failing sites geometrically so the
/// cost per shot scales with the number of faults, not the circuit size.
#[derive(Clone, Debug)]
pub struct FaultSampler {
    sites: NoiseSites,
    p: f64,
    log_q: f64,
}

/// Deterministic stream for one shot.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

impl FaultSampler {
    pub fn new(c: &Circuit, m: &ErrorModel) -> Self {
        Self {
            sites: NoiseSites::new(c, m),
            p: m.p,
            log_q: (-m.p).ln_1p(),
        }
    }

    pub fn sites(&self) -> &NoiseSites {
        &self.sites
    }

    /// Appends the faults of one shot to `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<FaultEvent>) {
        let sites = &self.sites.sites;
        if self.p <= 0.0 {
            return;
        }
        let mut i = 0usize;
        loop {
            if self.p < 1.0 {
                // 1 - u lies in (0, 1], so the log is finite
                let u: f64 = 1.0 - rng.gen::<f64>();
                let skip = (u.ln() / self.log_q).floor();
                if skip >= (sites.len() - i) as f64 {
                    return;
                }
                i += skip as usize;
            }
            if i >= sites.len() {
                return;
            }
            let site = &sites[i];
            let pauli = site.admissible[rng.gen_range(0..site.admissible.len())];
            out.push(FaultEvent {
                location: site.location,
                pauli,
            });
            i += 1;
        }
    }

    pub fn sample_shot(&self, seed: u64, shot: u64) -> Vec<FaultEvent> {
        let mut out = Vec::new();
        self.sample_into(&mut shot_rng(seed, shot), &mut out);
        out
    }
}

/// Independent faults for one shot drawn from `rng`.
pub fn sample_faults<R: Rng + ?Sized>(c: &Circuit, m: &ErrorModel, rng: &mut R) -> Vec<FaultEvent> {
    let mut out = Vec::new();
    FaultSampler::new(c, m).sample_into(rng, &mut out);
    out
}

/// Every admissible single fault, in stable order.
pub fn enumerate_single_faults(c: &Circuit, m: &ErrorModel) -> Vec<FaultEvent> {
    NoiseSites::new(c, m).single_faults().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairBudget {
    All,
    /// Exactly this many distinct pairs, drawn by picking a pair of distinct
    /// sites uniformly and then a uniform admissible Pauli at each.
    Sample(usize),
}

/// A pair of faults at distinct sites, with the indices of those sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaultPair {
    pub first: FaultEvent,
    pub second: FaultEvent,
    pub sites: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct PairSet {
    pub pairs: Vec<FaultPair>,
    /// Drawn pairs over all event pairs at distinct sites; 1 for `All`.
    pub sampling_fraction: f64,
    pub total_event_pairs: u64,
}

pub(crate) fn total_event_pairs(sites: &NoiseSites) -> u64 {
    let counts: Vec<u64> = sites.sites.iter().map(|s| s.admissible.len() as u64).collect();
    let total: u64 = counts.iter().sum();
    let squares: u64 = counts.iter().map(|c| c * c).sum();
    (total * total - squares) / 2
}

/// Pairs of faults at distinct sites, all of them or a deterministic sample.
pub fn enumerate_fault_pairs(c: &Circuit, m: &ErrorModel, budget: PairBudget, seed: u64) -> PairSet {
    let sites = NoiseSites::new(c, m);
    let total = total_event_pairs(&sites);
    match budget {
        PairBudget::All => {
            let mut pairs = Vec::new();
            for_each_pair(&sites, |pair| pairs.push(pair));
            PairSet {
                pairs,
                sampling_fraction: 1.0,
                total_event_pairs: total,
            }
        }
        PairBudget::Sample(s) => {
            let pairs = sample_pairs(&sites, s, seed);
            PairSet {
                sampling_fraction: pairs.len() as f64 / total as f64,
                pairs,
                total_event_pairs: total,
            }
        }
    }
}

pub(crate) fn for_each_pair(sites: &NoiseSites, mut f: impl FnMut(FaultPair)) {
    let s = &sites.sites;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            for &a in &s[i].admissible {
                for &b in &s[j].admissible {
                    f(FaultPair {
                        first: FaultEvent {
                            location: s[i].location,
                            pauli: a,
                        },
                        second: FaultEvent {
                            location: s[j].location,
                            pauli: b,
                        },
                        sites: (i, j),
                    });
                }
            }
        }
    }
}

fn draw_pair<R: Rng>(s: &[NoiseSite], rng: &mut R) -> (FaultPair, (usize, usize)) {
    let i = rng.gen_range(0..s.len());
    let j = rng.gen_range(0..s.len() - 1);
    let j = if j >= i { j + 1 } else { j };
    let (i, j) = (i.min(j), i.max(j));
    let a = rng.gen_range(0..s[i].admissible.len());
    let b = rng.gen_range(0..s[j].admissible.len());
    let pair = FaultPair {
        first: FaultEvent {
            location: s[i].location,
            pauli: s[i].admissible[a],
        },
        second: FaultEvent {
            location: s[j].location,
            pauli: s[j].admissible[b],
        },
        sites: (i, j),
    };
    (pair, (a, b))
}

/// `count` independent draws, repeats allowed. Unbiased for averages over
/// site pairs, unlike [`sample_pairs`].
pub(crate) fn draw_pairs(sites: &NoiseSites, count: usize, seed: u64) -> Vec<FaultPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| draw_pair(&sites.sites, &mut rng).0).collect()
}

pub(crate) fn sample_pairs(sites: &NoiseSites, count: usize, seed: u64) -> Vec<FaultPair> {
    let total = total_event_pairs(sites);
    assert!(
        (count as u64) <= total,
        "cannot draw {count} distinct pairs from {total}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (pair, (a, b)) = draw_pair(&sites.sites, &mut rng);
        if seen.insert((pair.sites, a, b)) {
            out.push(pair);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_fig1, build_fig2, CircuitLabel, GateOp};
    use crate::{ancilla, NUM_DATA};

    fn model(channel: AncillaChannel) -> ErrorModel {
        ErrorModel::new(0.01, channel)
    }

    #[test]
    fn zero_rate_samples_nothing() {
        let c = build_fig1();
        let s = FaultSampler::new(&c, &ErrorModel::new(0.0, AncillaChannel::Full));
        for shot in 0..1000 {
            assert!(s.sample_shot(3, shot).is_empty());
        }
    }

    #[test]
    fn unit_rate_hits_every_site() {
        let c = build_fig2();
        let m = ErrorModel::new(1.0, AncillaChannel::Full);
        let s = FaultSampler::new(&c, &m);
        assert_eq!(s.sample_shot(0, 0).len(), s.sites().sites.len());
    }

    #[test]
    fn admissible_counts() {
        let c = build_fig1();
        let full = NoiseSites::new(&c, &model(AncillaChannel::Full));
        let flip = NoiseSites::new(&c, &model(AncillaChannel::BitflipOnly));
        let mut n1 = 0;
        let mut n2 = 0;
        let mut wide = 0;
        for (sf, sb) in full.sites.iter().zip(&flip.sites) {
            match sf.qubits.len() {
                1 => {
                    n1 += 1;
                    assert_eq!(sf.admissible.len(), 3);
                    let expected = if sf.qubits[0] >= NUM_DATA { 1 } else { 3 };
                    assert_eq!(sb.admissible.len(), expected);
                }
                2 => {
                    n2 += 1;
                    assert_eq!(sf.admissible.len(), 15);
                    assert_eq!(sb.admissible.len(), 7);
                }
                k => {
                    wide += 1023;
                    assert_eq!(k, 5);
                    assert_eq!(sf.admissible.len(), 1023);
                }
            }
            assert!(sb.admissible.iter().all(|p| p.z_bits() & ANCILLA_MASK == 0));
        }
        assert_eq!(full.num_events(), 3 * n1 + 15 * n2 + wide);
        assert_eq!(full.sites.len(), full.locations.len());
    }

    #[test]
    fn wide_gate_models() {
        let c = build_fig2();
        let m = model(AncillaChannel::Full);
        let cp = |gn| {
            NoiseSites::new(&c, &m.with_gate_noise(gn))
                .sites
                .into_iter()
                .filter(|s| s.gate_kind == Some(GateKind::CPString))
                .collect::<Vec<_>>()
        };
        let local = cp(GateNoise::DataLocal);
        assert_eq!(local.len(), 14);
        // 3 on the ancilla alone, 4 data qubits x 3 x 4 with the ancilla
        assert!(local.iter().all(|s| s.admissible.len() == 51));
        assert!(cp(GateNoise::Uniform).iter().all(|s| s.admissible.len() == 1023));
        let per = cp(GateNoise::PerQubit);
        assert_eq!(per.len(), 14 * 5);
        assert!(per.iter().all(|s| s.admissible.len() == 3));
    }

    #[test]
    fn faults_stay_inside_their_location() {
        let c = build_fig2();
        let m = ErrorModel::new(0.3, AncillaChannel::Full);
        let s = FaultSampler::new(&c, &m);
        for shot in 0..200 {
            for f in s.sample_shot(1, shot) {
                let loc = &s.sites().locations[f.location];
                assert!(f.pauli.weight() >= 1);
                assert_eq!(f.pauli.support_mask() & !loc.support_mask(), 0);
            }
        }
    }

    #[test]
    fn one_qubit_location_draws_each_pauli_equally() {
        let c = Circuit::from_gates(CircuitLabel::Custom, vec![GateOp::h(0)]).unwrap();
        let m = ErrorModel::new(0.5, AncillaChannel::Full);
        let s = FaultSampler::new(&c, &m);
        let mut counts = [0usize; 4];
        let shots = 300_000;
        for shot in 0..shots {
            for f in s.sample_shot(9, shot) {
                if f.location == 0 {
                    counts[f.pauli.get(0) as usize] += 1;
                }
            }
        }
        assert_eq!(counts[0], 0);
        let expected = shots as f64 * 0.5 / 3.0;
        let sigma = (shots as f64 * (0.5 / 3.0) * (1.0 - 0.5 / 3.0)).sqrt();
        for &n in &counts[1..] {
            assert!((n as f64 - expected).abs() < 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn pair_counts_and_sampling() {
        let c = Circuit::from_gates(
            CircuitLabel::Custom,
            vec![GateOp::cnot(0, ancilla(0)), GateOp::h(1).at(1)],
        )
        .unwrap();
        let m = ErrorModel::new(0.1, AncillaChannel::Full);
        let sites = NoiseSites::new(&c, &m);
        let all = enumerate_fault_pairs(&c, &m, PairBudget::All, 0);
        let sizes: Vec<u64> = sites.sites.iter().map(|s| s.admissible.len() as u64).collect();
        let mut expected = 0;
        for i in 0..sizes.len() {
            for j in i + 1..sizes.len() {
                expected += sizes[i] * sizes[j];
            }
        }
        assert_eq!(all.pairs.len() as u64, expected);
        assert_eq!(all.total_event_pairs, expected);
        assert!(all.pairs.iter().all(|p| p.first.location != p.second.location));

        let a = enumerate_fault_pairs(&c, &m, PairBudget::Sample(500), 42);
        let b = enumerate_fault_pairs(&c, &m, PairBudget::Sample(500), 42);
        assert_eq!(a.pairs, b.pairs);
        assert_eq!(a.pairs.len(), 500);
        let distinct: HashSet<_> = a.pairs.iter().collect();
        assert_eq!(distinct.len(), 500);
        assert!((a.sampling_fraction - 500.0 / expected as f64).abs() < 1e-12);
    }

    #[test]
    fn single_fault_order_is_stable() {
        let c = build_fig1();
        let m = model(AncillaChannel::BitflipOnly);
        assert_eq!(enumerate_single_faults(&c, &m), enumerate_single_faults(&c, &m));
    }
}
