//! Dense state-vector reference used to check the frame engine.
#![allow(dead_code)]

use cecsim::circuit::{enumerate_locations, CircuitLabel};
use cecsim::engine::Engine;
use cecsim::pauli::Clifford;
use cecsim::{ancilla, Circuit, FaultEvent, GateKind, GateOp, PauliString, REGISTER_QUBITS};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub amp: Vec<Complex64>,
}

impl Dense {
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amp: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amp.iter_mut().for_each(|a| *a /= norm);
        Self { n, amp }
    }

    /// Random state on the qubits outside `zero`, with those in |0>.
    pub fn random_with_zeros(n: usize, zero: usize, seed: u64) -> Self {
        let mut s = Self::random(n, seed);
        for (b, a) in s.amp.iter_mut().enumerate() {
            if b & zero != 0 {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let norm = s.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        s.amp.iter_mut().for_each(|a| *a /= norm);
        s
    }

    /// `X^x Z^z`, which equals the Pauli with these bits up to a global phase.
    pub fn pauli(&mut self, x: usize, z: usize) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amp.len()];
        for (b, &a) in self.amp.iter().enumerate() {
            let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ x] = a * sign;
        }
        self.amp = out;
    }

    pub fn h(&mut self, q: usize) {
        let m = 1 << q;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for b in 0..self.amp.len() {
            if b & m == 0 {
                let (a0, a1) = (self.amp[b], self.amp[b | m]);
                self.amp[b] = (a0 + a1) * r;
                self.amp[b | m] = (a0 - a1) * r;
            }
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        self.controlled_pauli(1 << c, 1 << t, 0);
    }

    /// Applies the Hermitian Pauli with bits `(x, z)` (one factor of i per Y)
    /// on the branch where every qubit in `controls` is 1.
    pub fn controlled_pauli(&mut self, controls: usize, x: usize, z: usize) {
        let phase = Complex64::i().powi((x & z).count_ones() as i32);
        let mut out = self.amp.clone();
        for b in 0..self.amp.len() {
            if b & controls == controls {
                out[b ^ x] = Complex64::new(0.0, 0.0);
            }
        }
        for (b, &a) in self.amp.iter().enumerate() {
            if b & controls == controls {
                let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                out[b ^ x] += a * sign * phase;
            }
        }
        self.amp = out;
    }

    /// Projects qubit `q` onto |0> without renormalizing; the callers only
    /// prepare qubits that are already |0>.
    pub fn prep0(&mut self, q: usize) {
        for (b, a) in self.amp.iter_mut().enumerate() {
            if b >> q & 1 == 1 {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn same_ray(&self, other: &Self) -> bool {
        let overlap: Complex64 = self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum();
        let na: f64 = self.amp.iter().map(|a| a.norm_sqr()).sum();
        let nb: f64 = other.amp.iter().map(|a| a.norm_sqr()).sum();
        (overlap.norm() - (na * nb).sqrt()).abs() < 1e-9 && na > 1e-12
    }
}

/// Maps oracle qubit `i` to register qubit `map[i]`.
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn oracle_bit(&self, reg_q: usize) -> usize {
        1 << self
            .map
            .iter()
            .position(|&r| r == reg_q)
            .expect("qubit inside the embedding")
    }

    pub fn mask(&self, reg_mask: u64) -> usize {
        (0..REGISTER_QUBITS)
            .filter(|q| reg_mask >> q & 1 == 1)
            .map(|q| self.oracle_bit(q))
            .fold(0, |m, b| m | b)
    }

    pub fn to_register(&self, x: usize, z: usize) -> PauliString {
        let (mut rx, mut rz) = (0u64, 0u64);
        for (i, &r) in self.map.iter().enumerate() {
            rx |= ((x >> i & 1) as u64) << r;
            rz |= ((z >> i & 1) as u64) << r;
        }
        PauliString::from_bits(REGISTER_QUBITS, rx, rz)
    }

    pub fn apply(&self, s: &mut Dense, g: &GateOp) {
        match g.kind {
            GateKind::H => s.h(self.oracle_bit(g.qubits[0]).trailing_zeros() as usize),
            GateKind::Cnot => s.controlled_pauli(self.oracle_bit(g.qubits[0]), self.oracle_bit(g.qubits[1]), 0),
            GateKind::CPString => {
                let body = g.body.unwrap();
                s.controlled_pauli(
                    self.oracle_bit(g.qubits[0]),
                    self.mask(body.x_bits()),
                    self.mask(body.z_bits()),
                )
            }
            GateKind::CkxClassical => {
                let controls = g.qubits[..4].iter().fold(0, |m, &q| m | self.oracle_bit(q));
                s.controlled_pauli(controls, self.oracle_bit(g.qubits[4]), 0)
            }
            GateKind::Prep0 | GateKind::Reset => s.prep0(self.oracle_bit(g.qubits[0]).trailing_zeros() as usize),
        }
    }
}

/// Checks `U P |psi> ~ P' U |psi>` for every nontrivial `P` on `n` qubits.
/// Returns (cases, mismatches).
pub fn check_conjugation(n: usize, g: &Clifford, seed: u64) -> (usize, usize) {
    let psi = Dense::random(n, seed);
    let apply = |s: &mut Dense| match g {
        Clifford::H(q) => s.h(*q),
        Clifford::Cnot { control, target } => s.cnot(*control, *target),
        Clifford::ControlledPauli { control, body } => {
            s.controlled_pauli(1 << control, body.x_bits() as usize, body.z_bits() as usize)
        }
    };
    let mut mismatches = 0;
    let mut cases = 0;
    for x in 0..1usize << n {
        for z in 0..1usize << n {
            if x == 0 && z == 0 {
                continue;
            }
            cases += 1;
            let mut lhs = psi.clone();
            lhs.pauli(x, z);
            apply(&mut lhs);
            let p = g.conjugate(&PauliString::from_bits(n, x as u64, z as u64));
            let mut rhs = psi.clone();
            apply(&mut rhs);
            rhs.pauli(p.x_bits() as usize, p.z_bits() as usize);
            if !lhs.same_ray(&rhs) {
                mismatches += 1;
            }
        }
    }
    (cases, mismatches)
}

/// Runs `gates` densely with one fault after timestep `k` and compares the
/// result with the engine's final frame applied to the fault-free output.
/// Every nontrivial Pauli on the embedded qubits is tried at every timestep.
/// Returns (cases, mismatches).
pub fn check_gadget(gates: Vec<GateOp>, emb: &Embedding, zero: usize, seed: u64) -> (usize, usize) {
    let c = Circuit::from_gates(CircuitLabel::Custom, gates).unwrap();
    let engine = Engine::new(&c);
    let locations = enumerate_locations(&c);
    let n = emb.map.len();
    let psi = Dense::random_with_zeros(n, zero, seed);
    let run = |fault: Option<(usize, usize, usize)>| {
        let mut s = psi.clone();
        for t in 0..c.depth() {
            for g in c.gates().iter().filter(|g| g.timestep == t) {
                emb.apply(&mut s, g);
            }
            if let Some((k, x, z)) = fault {
                if k == t {
                    s.pauli(x, z);
                }
            }
        }
        s
    };
    let ideal = run(None);
    let (mut cases, mut mismatches) = (0, 0);
    for k in 0..c.depth() {
        let loc = locations.iter().find(|l| l.timestep == k).unwrap().id;
        for x in 0..1usize << n {
            for z in 0..1usize << n {
                if x == 0 && z == 0 {
                    continue;
                }
                cases += 1;
                let fault = FaultEvent {
                    location: loc,
                    pauli: emb.to_register(x, z),
                };
                let frame = engine.frame_before(c.depth(), &[fault], None);
                let mut predicted = ideal.clone();
                predicted.pauli(emb.mask(frame.x_bits()), emb.mask(frame.z_bits()));
                if !run(Some((k, x, z))).same_ray(&predicted) {
                    mismatches += 1;
                }
            }
        }
    }
    (cases, mismatches)
}

/// Single-stabilizer kickback extraction: PREP0, H, controlled Z-string, H.
/// Embedded on the four support qubits of stabilizer 0, one more data qubit
/// and its ancilla.
pub fn kickback_gadget() -> (Vec<GateOp>, Embedding, usize) {
    let code = cecsim::build_code();
    let support = code.support(0);
    let a = ancilla(0);
    let extra = (0..7).find(|q| !support.contains(q)).unwrap();
    let body = PauliString::uniform(REGISTER_QUBITS, support.iter().copied(), cecsim::Pauli::Z);
    let gates = vec![
        GateOp::prep0(a).at(0),
        GateOp::h(a).at(1),
        GateOp::cpstring(a, body).at(2),
        GateOp::h(a).at(3),
    ];
    let mut map = support.clone();
    map.push(extra);
    map.push(a);
    (gates, Embedding { map }, 1 << 5)
}

/// Outcome of one CKX configuration check.
pub struct CkxCase {
    pub controls: u8,
    pub target_frame: (usize, usize),
    pub agrees: bool,
}

/// Controls in basis state `c` (as frame X bits against the all-zero
/// reference), target carrying one of I, X, Y, Z in its frame.
pub fn check_ckx(seed: u64) -> Vec<CkxCase> {
    let controls = [ancilla(0), ancilla(1), ancilla(2), ancilla(3)];
    let target = 0;
    // step 0 only holds an unrelated reset so faults can be placed before the gate
    let gates = vec![GateOp::reset(ancilla(6)).at(0), GateOp::ckx(controls, target).at(1)];
    let c = Circuit::from_gates(CircuitLabel::Custom, gates).unwrap();
    let engine = Engine::new(&c);
    let emb = Embedding {
        map: vec![target, controls[0], controls[1], controls[2], controls[3]],
    };
    let psi = Dense::random_with_zeros(5, 0b11110, seed);
    let mut out = Vec::new();
    for bits in 0u8..16 {
        for (tx, tz) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
            let x = (bits as usize) << 1 | tx;
            let z = tz;
            let fault = FaultEvent {
                location: 0,
                pauli: emb.to_register(x, z),
            };
            let frame = engine.frame_before(c.depth(), &[fault], None);

            let mut actual = psi.clone();
            actual.pauli(x, z);
            actual.controlled_pauli(0b11110, 1, 0);

            let mut predicted = psi.clone();
            predicted.controlled_pauli(0b11110, 1, 0);
            predicted.pauli(emb.mask(frame.x_bits()), emb.mask(frame.z_bits()));
            out.push(CkxCase {
                controls: bits,
                target_frame: (tx, tz),
                agrees: actual.same_ray(&predicted),
            });
        }
    }
    out
}
