//! Logical error rates: Monte Carlo estimates with Wilson intervals, the
//! exhaustive single-fault census (linear coefficient), the fault-pair
//! estimate of the quadratic coefficient, and the `A p + B p^2` fit with its
//! pseudo-threshold.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitLabel, GateKind, LocationKind};
use crate::engine::Engine;
use crate::noise::{draw_pairs, total_event_pairs, ErrorModel, FaultEvent, FaultSampler, NoiseSites, PairBudget};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Shots per work unit; fixed so results do not depend on the worker count.
const CHUNK: u64 = 1 << 13;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0 && k <= n, "wilson interval needs 0 <= k <= n, n > 0");
    let n = n as f64;
    let phat = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = phat + z2 / (2.0 * n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = ((centre - half) / denom).max(0.0);
    let hi = ((centre + half) / denom).min(1.0);
    // keep the point estimate inside despite rounding at k = 0 or k = n
    (lo.min(phat), hi.max(phat))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    pub circuit: CircuitLabel,
    pub model: String,
    pub p: f64,
    pub shots: u64,
    pub failures: u64,
    pub p_log: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl RateEstimate {
    pub fn from_counts(circuit: CircuitLabel, model: &ErrorModel, shots: u64, failures: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, shots, Z95);
        Self {
            circuit,
            model: model.ancilla_channel.name().to_string(),
            p: model.p,
            shots,
            failures,
            p_log: failures as f64 / shots as f64,
            ci_low,
            ci_high,
            seed,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Counts logical failures over `shots` independent rounds at `m.p`.
///
/// Shot `i` draws its faults from a stream keyed by `(seed, i)`, so the count
/// is identical for any number of rayon workers.
pub fn estimate_rate(c: &Circuit, m: &ErrorModel, shots: u64, seed: u64) -> RateEstimate {
    assert!(shots >= 1, "need at least one shot");
    let sampler = FaultSampler::new(c, m);
    let engine = Engine::new(c);
    let chunks = shots.div_ceil(CHUNK);
    let failures: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut faults = Vec::new();
            let mut failed = 0u64;
            for shot in chunk * CHUNK..((chunk + 1) * CHUNK).min(shots) {
                faults.clear();
                sampler.sample_into(&mut crate::noise::shot_rng(seed, shot), &mut faults);
                if !faults.is_empty() && engine.run_unchecked(&faults, None).failed {
                    failed += 1;
                }
            }
            failed
        })
        .sum();
    RateEstimate::from_counts(c.label, m, shots, failures, seed)
}

/// Malignant share of one noise site.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteFraction {
    pub location: usize,
    pub timestep: usize,
    pub kind: LocationKind,
    pub gate_kind: Option<GateKind>,
    /// 1-indexed qubits of the site.
    pub qubits: Vec<usize>,
    pub malignant: usize,
    pub admissible: usize,
    pub fraction: f64,
}

impl SiteFraction {
    /// Exact rational comparison `malignant / admissible == num / den`.
    pub fn fraction_is(&self, num: usize, den: usize) -> bool {
        self.malignant * den == self.admissible * num
    }

    pub fn is_single_qubit(&self) -> bool {
        self.qubits.len() == 1
    }

    pub fn is_cnot(&self) -> bool {
        self.gate_kind == Some(GateKind::Cnot)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MalignantEvent {
    pub location: usize,
    /// 1-indexed Pauli literal.
    pub pauli: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaultCensus {
    pub circuit: CircuitLabel,
    pub model: String,
    pub gate_noise: String,
    /// Malignant single-qubit sites (idles and one-qubit gates).
    pub n_m: usize,
    /// Malignant CNOT sites.
    pub n_g: usize,
    /// Malignant sites on gates wider than two qubits.
    pub n_wide: usize,
    /// Sum over sites of the malignant fraction: the coefficient of `p`.
    pub linear_coeff: f64,
    /// `n_m * 2/3 + n_g * 8/15`, for comparison with the exact sum.
    pub shortcut_coeff: f64,
    pub single_faults: usize,
    /// Only sites with at least one malignant Pauli.
    pub per_location: Vec<SiteFraction>,
    pub malignant_events: Vec<MalignantEvent>,
}

impl FaultCensus {
    pub fn is_fault_tolerant(&self) -> bool {
        self.malignant_events.is_empty()
    }
}

/// Runs every admissible single fault through the round.
pub fn fault_census(c: &Circuit, m: &ErrorModel) -> FaultCensus {
    let sites = NoiseSites::new(c, m);
    let engine = Engine::new(c);
    let per_site: Vec<(usize, Vec<FaultEvent>)> = sites
        .sites
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let bad: Vec<FaultEvent> = s
                .admissible
                .iter()
                .map(|&pauli| FaultEvent {
                    location: s.location,
                    pauli,
                })
                .filter(|f| engine.run_unchecked(std::slice::from_ref(f), None).failed)
                .collect();
            (i, bad)
        })
        .collect();

    let mut census = FaultCensus {
        circuit: c.label,
        model: m.ancilla_channel.name().to_string(),
        gate_noise: m.gate_noise.name().to_string(),
        n_m: 0,
        n_g: 0,
        n_wide: 0,
        linear_coeff: 0.0,
        shortcut_coeff: 0.0,
        single_faults: sites.num_events(),
        per_location: Vec::new(),
        malignant_events: Vec::new(),
    };
    for (i, bad) in per_site {
        if bad.is_empty() {
            continue;
        }
        let s = &sites.sites[i];
        let frac = SiteFraction {
            location: s.location,
            timestep: s.timestep,
            kind: s.kind,
            gate_kind: s.gate_kind,
            qubits: s.qubits.iter().map(|q| q + 1).collect(),
            malignant: bad.len(),
            admissible: s.admissible.len(),
            fraction: bad.len() as f64 / s.admissible.len() as f64,
        };
        match s.qubits.len() {
            1 => census.n_m += 1,
            2 if s.gate_kind == Some(GateKind::Cnot) => census.n_g += 1,
            _ => census.n_wide += 1,
        }
        census.linear_coeff += frac.fraction;
        census.per_location.push(frac);
        census.malignant_events.extend(bad.iter().map(|f| MalignantEvent {
            location: f.location,
            pauli: f.pauli.to_string(),
        }));
    }
    census.shortcut_coeff = census.n_m as f64 * 2.0 / 3.0 + census.n_g as f64 * 8.0 / 15.0;
    census
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticEstimate {
    /// Coefficient of `p^2` from malignant pairs of faults at distinct sites.
    pub b: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub exact: bool,
    pub pairs_evaluated: u64,
    pub malignant_pairs: u64,
    pub sampling_fraction: f64,
    /// Linear coefficient from the single-fault census.
    pub a: f64,
    /// Set when the interval is wider than the estimate itself.
    pub wide_ci: bool,
}

/// Estimates the second-order coefficient `B = sum over site pairs of the
/// fraction of malignant Pauli pairs`.
///
/// With `PairBudget::All` every pair is run and the result is exact. With
/// `PairBudget::Sample(s)`, site pairs are drawn uniformly (then a uniform
/// admissible Pauli at each) with replacement, so
/// `B = (#site pairs) * P(malignant draw)`. Rejecting repeats would
/// underweight site pairs with few admissible Paulis.
pub fn quadratic_coeff(c: &Circuit, m: &ErrorModel, budget: PairBudget, seed: u64) -> QuadraticEstimate {
    let a = fault_census(c, m).linear_coeff;
    let sites = NoiseSites::new(c, m);
    let engine = Engine::new(c);
    let malignant = |pair: &crate::noise::FaultPair| engine.run_unchecked(&[pair.first, pair.second], None).failed;

    match budget {
        PairBudget::All => {
            // parallel over first site; pairs of the same (i, j) share a weight
            let n = sites.sites.len();
            let (b, evaluated, bad) = (0..n)
                .into_par_iter()
                .map(|i| {
                    let si = &sites.sites[i];
                    let mut b = 0.0;
                    let mut evaluated = 0u64;
                    let mut bad_total = 0u64;
                    for j in i + 1..n {
                        let sj = &sites.sites[j];
                        let mut bad = 0u64;
                        for &pa in &si.admissible {
                            for &pb in &sj.admissible {
                                let faults = [
                                    FaultEvent {
                                        location: si.location,
                                        pauli: pa,
                                    },
                                    FaultEvent {
                                        location: sj.location,
                                        pauli: pb,
                                    },
                                ];
                                bad += engine.run_unchecked(&faults, None).failed as u64;
                            }
                        }
                        let total = (si.admissible.len() * sj.admissible.len()) as u64;
                        evaluated += total;
                        bad_total += bad;
                        b += bad as f64 / total as f64;
                    }
                    (b, evaluated, bad_total)
                })
                .reduce(|| (0.0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
            QuadraticEstimate {
                b,
                ci_low: b,
                ci_high: b,
                exact: true,
                pairs_evaluated: evaluated,
                malignant_pairs: bad,
                sampling_fraction: 1.0,
                a,
                wide_ci: false,
            }
        }
        PairBudget::Sample(s) => {
            let pairs = draw_pairs(&sites, s, seed);
            let bad = pairs.par_iter().filter(|p| malignant(p)).count() as u64;
            let scale = sites.num_site_pairs() as f64;
            let (lo, hi) = wilson_interval(bad, s as u64, Z95);
            let b = scale * bad as f64 / s as f64;
            let total_events = total_event_pairs(&sites);
            QuadraticEstimate {
                b,
                ci_low: scale * lo,
                ci_high: scale * hi,
                exact: false,
                pairs_evaluated: s as u64,
                malignant_pairs: bad,
                sampling_fraction: s as f64 / total_events as f64,
                a,
                wide_ci: scale * (hi - lo) > b,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    /// Positive root of `A p + B p^2 = p`; `None` when `A >= 1` or `B <= 0`.
    pub threshold: Option<f64>,
    pub chi2: f64,
    pub points: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point at p = {0} has no usable interval")]
    BadPoint(f64),
    #[error("design matrix is singular (points do not pin both coefficients)")]
    Degenerate,
}

pub fn threshold_of(a: f64, b: f64) -> Option<f64> {
    (a < 1.0 && b > 0.0).then(|| (1.0 - a) / b)
}

/// Weighted least squares of `p_log` on `(p, p^2)` with no intercept,
/// weights `1 / sigma^2` where sigma is the Wilson half-width over `Z95`,
/// and both coefficients constrained non-negative.
pub fn fit_and_threshold(points: &[RateEstimate]) -> Result<FitResult, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    let scale = points.iter().map(|r| r.p).fold(0.0f64, f64::max);
    // rows in the scaled variable u = p / scale
    let mut rows = Vec::with_capacity(points.len());
    for r in points {
        let sigma = (r.ci_high - r.ci_low) / (2.0 * Z95);
        if !(sigma.is_finite() && sigma > 0.0 && r.p > 0.0) {
            return Err(FitError::BadPoint(r.p));
        }
        rows.push((r.p / scale, r.p_log, 1.0 / (sigma * sigma)));
    }

    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(u, y, w) in &rows {
        s11 += w * u * u;
        s12 += w * u * u * u;
        s22 += w * u * u * u * u;
        t1 += w * u * y;
        t2 += w * u * u * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.is_nan() || det <= 1e-12 * s11 * s22 {
        return Err(FitError::Degenerate);
    }
    let chi2 = |a: f64, b: f64| {
        rows.iter()
            .map(|&(u, y, w)| w * (y - a * u - b * u * u).powi(2))
            .sum::<f64>()
    };

    let free = ((s22 * t1 - s12 * t2) / det, (s11 * t2 - s12 * t1) / det);
    let (a, b) = if free.0 >= 0.0 && free.1 >= 0.0 {
        free
    } else {
        [(t1.max(0.0) / s11, 0.0), (0.0, t2.max(0.0) / s22)]
            .into_iter()
            .min_by(|x, y| chi2(x.0, x.1).total_cmp(&chi2(y.0, y.1)))
            .expect("two candidates")
    };
    let chi2 = chi2(a, b);
    let (a, b) = (a / scale, b / (scale * scale));
    Ok(FitResult {
        a,
        b,
        threshold: threshold_of(a, b),
        chi2,
        points: points.len(),
    })
}
