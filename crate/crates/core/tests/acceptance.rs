//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use cecsim::analysis::{estimate_rate, fault_census, fit_and_threshold, FaultCensus};
use cecsim::circuit::enumerate_locations;
use cecsim::pauli::Clifford;
use cecsim::steane::{Redundancy, Sector};
use cecsim::{
    build_code, build_fig1, build_fig2, AncillaChannel, Circuit, ErrorModel, GateKind, LogicalClass, Pauli,
    PauliString, ANCILLA_MASK, REGISTER_QUBITS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [f64; 6] = [1e-4, 2e-4, 3e-4, 5e-4, 7e-4, 1e-3];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn census(c: &Circuit, channel: AncillaChannel) -> FaultCensus {
    fault_census(c, &ErrorModel::new(0.0, channel))
}

fn first_correction(c: &Circuit) -> usize {
    c.gates()
        .iter()
        .find(|g| g.kind == GateKind::CkxClassical)
        .unwrap()
        .timestep
}

fn dichotomy() -> Outcome {
    let fig1 = build_fig1();
    let fig2 = census(&build_fig2(), AncillaChannel::Full);
    let bitflip = census(&fig1, AncillaChannel::BitflipOnly);
    let full = census(&fig1, AncillaChannel::Full);
    let locs = enumerate_locations(&fig1);
    let window = first_correction(&fig1);
    let ancilla_z = full.malignant_events.iter().any(|e| {
        let p = PauliString::parse(REGISTER_QUBITS, &e.pauli).unwrap();
        locs[e.location].timestep < window && p.z_bits() & ANCILLA_MASK != 0
    });
    let pass = fig2.linear_coeff == 0.0
        && fig2.malignant_events.is_empty()
        && bitflip.linear_coeff == 0.0
        && bitflip.malignant_events.is_empty()
        && full.linear_coeff > 0.0
        && ancilla_z;
    Outcome {
        pass,
        detail: format!(
            "fig2+full A={} ({} malignant), fig1+bitflip A={} ({} malignant), fig1+full A={:.4} ancilla-Z in first extraction: {ancilla_z}",
            fig2.linear_coeff,
            fig2.malignant_events.len(),
            bitflip.linear_coeff,
            bitflip.malignant_events.len(),
            full.linear_coeff
        ),
    }
}

fn linear_coefficient() -> Outcome {
    let fig1 = build_fig1();
    let full = census(&fig1, AncillaChannel::Full);
    let a_ok = (8.0..=16.0).contains(&full.linear_coeff);
    let singles: Vec<_> = full.per_location.iter().filter(|s| s.is_single_qubit()).collect();
    let cnots: Vec<_> = full.per_location.iter().filter(|s| s.is_cnot()).collect();
    let singles_ok = singles.iter().all(|s| s.fraction_is(2, 3));
    let cnots_ok = cnots.iter().all(|s| s.fraction_is(8, 15));
    let cnot_fractions: std::collections::BTreeSet<String> = cnots
        .iter()
        .map(|s| format!("{}/{}", s.malignant, s.admissible))
        .collect();
    // malignant CNOT sites summed per ancilla and extraction quarter
    let locs = enumerate_locations(&fig1);
    let window = first_correction(&fig1);
    let mut per_ancilla = std::collections::BTreeMap::<(usize, bool), usize>::new();
    for s in &cnots {
        let l = &locs[s.location];
        *per_ancilla.entry((l.support[1], l.timestep < window)).or_default() += s.malignant;
    }
    let windows: std::collections::BTreeSet<String> = per_ancilla.values().map(|&m| format!("{m}/15")).collect();
    Outcome {
        pass: a_ok && singles_ok && cnots_ok,
        detail: format!(
            "A={:.4} (in [8,16]: {a_ok}); {} single-qubit sites all 2/3: {singles_ok}; {} CNOT sites all 8/15: {cnots_ok} (per-site fractions {:?}, summed per ancilla and quarter {:?})",
            full.linear_coeff,
            singles.len(),
            cnots.len(),
            cnot_fractions,
            windows
        ),
    }
}

fn monte_carlo_oracle() -> Outcome {
    let c = build_fig1();
    let p = 1e-5;
    let m = ErrorModel::new(p, AncillaChannel::Full);
    let a = fault_census(&c, &m).linear_coeff;
    let r = estimate_rate(&c, &m, 10_000_000, 0);
    Outcome {
        pass: r.contains(a * p),
        detail: format!(
            "p_log={:.4e} CI [{:.4e}, {:.4e}] from {} failures; A*p={:.4e}",
            r.p_log,
            r.ci_low,
            r.ci_high,
            r.failures,
            a * p
        ),
    }
}

fn thresholds() -> Outcome {
    let fit = |c: &Circuit, channel| {
        let rows: Vec<_> = GRID
            .iter()
            .map(|&p| estimate_rate(c, &ErrorModel::new(p, channel), 1_000_000, 0))
            .collect();
        fit_and_threshold(&rows).unwrap()
    };
    let fig2 = fit(&build_fig2(), AncillaChannel::Full);
    let bitflip = fit(&build_fig1(), AncillaChannel::BitflipOnly);
    let full = fit(&build_fig1(), AncillaChannel::Full);
    let within = |t: Option<f64>, lo: f64, hi: f64| t.is_some_and(|t| (lo..=hi).contains(&t));
    let fig2_ok = within(fig2.threshold, 2e-5, 1e-4);
    let bitflip_ok = within(bitflip.threshold, 2.5e-5, 1.2e-4);
    let full_ok = full.threshold.is_none();
    let show = |t: Option<f64>| t.map_or("none".to_string(), |t| format!("{t:.3e}"));
    Outcome {
        pass: fig2_ok && bitflip_ok && full_ok,
        detail: format!(
            "fig2+full {} (A={:.3}, B={:.4e}) in [2e-5,1e-4]: {fig2_ok}; fig1+bitflip {} (A={:.3}, B={:.4e}) in [2.5e-5,1.2e-4]: {bitflip_ok}; fig1+full {} (A={:.3}): {full_ok}",
            show(fig2.threshold),
            fig2.a,
            fig2.b,
            show(bitflip.threshold),
            bitflip.a,
            bitflip.b,
            show(full.threshold),
            full.a
        ),
    }
}

fn engine_oracle() -> Outcome {
    let (gates, emb, zero) = common::kickback_gadget();
    let (cases, bad) = common::check_gadget(gates, &emb, zero, 21);
    let ckx = common::check_ckx(22);
    let ckx_bad = ckx.iter().filter(|c| !c.agrees).count();
    Outcome {
        pass: bad == 0 && ckx_bad == 0,
        detail: format!(
            "kickback gadget {}/{cases} faults agree; CKX {}/{} configurations agree",
            cases - bad,
            ckx.len() - ckx_bad,
            ckx.len()
        ),
    }
}

fn random_pauli(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    let mask = (1u64 << n) - 1;
    PauliString::from_bits(n, rng.gen::<u64>() & mask, rng.gen::<u64>() & mask)
}

fn random_clifford(rng: &mut ChaCha8Rng, n: usize) -> Clifford {
    let a = rng.gen_range(0..n);
    let b = (a + rng.gen_range(1..n)) % n;
    match rng.gen_range(0..3) {
        0 => Clifford::H(a),
        1 => Clifford::Cnot { control: a, target: b },
        _ => {
            let mut body = random_pauli(rng, n);
            body.set(a, Pauli::I);
            Clifford::ControlledPauli { control: a, body }
        }
    }
}

fn invariant_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = REGISTER_QUBITS;
    let mut conj_bad = 0;
    for _ in 0..10_000 {
        let g = random_clifford(&mut rng, n);
        let (p, q) = (random_pauli(&mut rng, n), random_pauli(&mut rng, n));
        let (gp, gq) = (g.conjugate(&p), g.conjugate(&q));
        if g.conjugate(&(p * q)) != gp * gq || p.commutes(&q) != gp.commutes(&gq) {
            conj_bad += 1;
        }
    }

    let code = build_code();
    let mut lin_bad = 0;
    for _ in 0..10_000 {
        let mask = cecsim::DATA_MASK;
        let (a, b) = (
            random_pauli(&mut rng, n).restrict(mask),
            random_pauli(&mut rng, n).restrict(mask),
        );
        for sector in [Sector::Z, Sector::X] {
            for red in [Redundancy::Generators, Redundancy::Redundant] {
                if code.syndrome_of(&(a * b), sector, red)
                    != code.syndrome_of(&a, sector, red) ^ code.syndrome_of(&b, sector, red)
                {
                    lin_bad += 1;
                }
            }
        }
    }

    let all: Vec<PauliString> = code.z_redundant.iter().chain(&code.x_redundant).copied().collect();
    let structure = all.iter().all(|s| all.iter().all(|t| s.commutes(t)))
        && all
            .iter()
            .all(|s| s.commutes(&code.logical_x) && s.commutes(&code.logical_z))
        && !code.logical_x.commutes(&code.logical_z)
        && (0..7).all(|i| code.support(i).len() == 4)
        && (0..7).all(|i| {
            (0..7)
                .filter(|&j| j != i)
                .all(|j| (code.support_mask(i) & code.support_mask(j)).count_ones() == 2)
        })
        && code
            .support_table
            .iter()
            .enumerate()
            .all(|(q, row)| row.iter().all(|&i| code.support(i).contains(&q)));

    let mut corrected = [0; 2];
    for (k, c) in [build_fig1(), build_fig2()].iter().enumerate() {
        let engine = cecsim::Engine::new(c);
        for q in 0..7 {
            for p in Pauli::NON_IDENTITY {
                let out = engine.run(&[], Some(PauliString::single(n, q, p))).unwrap();
                corrected[k] += (out.cls == LogicalClass::I) as usize;
            }
        }
    }

    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_cecsim"))
            .args([
                "simulate",
                "--circuit",
                "fig2",
                "--p",
                "2e-4,1e-3",
                "--shots",
                "40000",
                "--seed",
                "3",
            ])
            .args(["--workers", workers])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let reference = run("1");
    let cli_ok = ["1", "2", "5"].iter().all(|w| run(w) == reference);

    let pass = conj_bad == 0 && lin_bad == 0 && structure && corrected == [21, 21] && cli_ok;
    Outcome {
        pass,
        detail: format!(
            "conjugation {conj_bad}/10000 bad; syndrome linearity {lin_bad} bad; code structure {structure}; corrected fig1 {}/21 fig2 {}/21; CLI byte-identical across workers and reruns: {cli_ok}",
            corrected[0], corrected[1]
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("fault-tolerance dichotomy", dichotomy),
        ("linear coefficient", linear_coefficient),
        ("Monte Carlo vs census", monte_carlo_oracle),
        ("thresholds", thresholds),
        ("engine oracle equivalence", engine_oracle),
        ("invariant suites", invariant_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {name}: {verdict} [{:.1}s] {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += !o.pass as usize;
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
