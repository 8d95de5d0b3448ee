//! C ABI over `cecsim`.
//!
//! Circuits are opaque handles created by `cecsim_circuit_build` or
//! `cecsim_circuit_import` and released with `cecsim_circuit_free`. Every
//! fallible call returns a `CecsimStatus`; on failure a message is available
//! from `cecsim_last_error` until the next call on the same thread. Strings
//! handed out by the library are released with `cecsim_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cecsim::analysis::{estimate_rate, fault_census};
use cecsim::circuit::{export_text, import_text};
use cecsim::engine::EngineError;
use cecsim::{
    build_fig1, build_fig2, AncillaChannel, Circuit, Engine, ErrorModel, FaultEvent, GateNoise, LogicalClass,
    PauliString, REGISTER_QUBITS,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CecsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownLocation = 3,
    Parse = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CecsimCircuitLabel {
    Fig1 = 1,
    Fig2 = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CecsimModel {
    Full = 0,
    BitflipAncilla = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CecsimGateNoise {
    DataLocal = 0,
    Uniform = 1,
    PerQubit = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CecsimClass {
    I = 0,
    X = 1,
    Z = 2,
    Y = 3,
}

/// Opaque circuit handle.
pub struct CecsimCircuit {
    circuit: Circuit,
    engine: Engine,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CecsimRate {
    pub p: f64,
    pub shots: u64,
    pub failures: u64,
    pub p_log: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CecsimCensus {
    /// Coefficient of p in the logical error rate.
    pub linear_coeff: f64,
    pub n_m: usize,
    pub n_g: usize,
    pub n_wide: usize,
    pub malignant_events: usize,
    pub single_faults: usize,
}

/// One fault: a location id and a Pauli literal such as `Z8` or `X1.Y8`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CecsimFault {
    pub location: usize,
    pub pauli: *const c_char,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CecsimStatus, String);

fn set_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CecsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            CecsimStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("internal panic".into()));
            CecsimStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CecsimStatus::NullPointer, format!("{what} is null"))
}

unsafe fn circuit_ref<'a>(c: *const CecsimCircuit) -> Result<&'a CecsimCircuit, Failure> {
    c.as_ref().ok_or_else(|| null("circuit"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(CecsimStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn pauli(lit: &str) -> Result<PauliString, Failure> {
    PauliString::parse(REGISTER_QUBITS, lit).map_err(|e| Failure(CecsimStatus::Parse, format!("`{lit}`: {e}")))
}

fn model(p: f64, m: CecsimModel, g: CecsimGateNoise) -> Result<ErrorModel, Failure> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Failure(
            CecsimStatus::InvalidArgument,
            format!("p = {p} is not a probability"),
        ));
    }
    let channel = match m {
        CecsimModel::Full => AncillaChannel::Full,
        CecsimModel::BitflipAncilla => AncillaChannel::BitflipOnly,
    };
    let gate_noise = match g {
        CecsimGateNoise::DataLocal => GateNoise::DataLocal,
        CecsimGateNoise::Uniform => GateNoise::Uniform,
        CecsimGateNoise::PerQubit => GateNoise::PerQubit,
    };
    Ok(ErrorModel::new(p, channel).with_gate_noise(gate_noise))
}

fn boxed(circuit: Circuit) -> *mut CecsimCircuit {
    let engine = Engine::new(&circuit);
    Box::into_raw(Box::new(CecsimCircuit { circuit, engine }))
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library; valid until the next call.
#[no_mangle]
pub extern "C" fn cecsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn cecsim_circuit_build(label: CecsimCircuitLabel, out: *mut *mut CecsimCircuit) -> CecsimStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = match label {
            CecsimCircuitLabel::Fig1 => build_fig1(),
            CecsimCircuitLabel::Fig2 => build_fig2(),
        };
        *out = boxed(c);
        Ok(())
    })
}

/// Parses the circuit text format.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn cecsim_circuit_import(text: *const c_char, out: *mut *mut CecsimCircuit) -> CecsimStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(text, "text")?;
        let c = import_text(text).map_err(|e| Failure(CecsimStatus::Parse, e.to_string()))?;
        *out = boxed(c);
        Ok(())
    })
}

/// # Safety
/// `c` must come from this library and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cecsim_circuit_free(c: *mut CecsimCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of timesteps; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cecsim_circuit_depth(c: *const CecsimCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.circuit.depth())
}

/// Number of fault locations; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cecsim_circuit_num_locations(c: *const CecsimCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.engine.num_locations())
}

/// Circuit text; release with `cecsim_string_free`.
///
/// # Safety
/// `c` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn cecsim_circuit_export(c: *const CecsimCircuit, out: *mut *mut c_char) -> CecsimStatus {
    guard(|| {
        let c = circuit_ref(c)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(export_text(&c.circuit)).expect("ASCII text").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cecsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exhaustive single-fault census.
///
/// # Safety
/// `c` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cecsim_census(
    c: *const CecsimCircuit,
    model_kind: CecsimModel,
    gate_noise: CecsimGateNoise,
    out: *mut CecsimCensus,
) -> CecsimStatus {
    guard(|| {
        let c = circuit_ref(c)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let census = fault_census(&c.circuit, &model(0.0, model_kind, gate_noise)?);
        *out = CecsimCensus {
            linear_coeff: census.linear_coeff,
            n_m: census.n_m,
            n_g: census.n_g,
            n_wide: census.n_wide,
            malignant_events: census.malignant_events.len(),
            single_faults: census.single_faults,
        };
        Ok(())
    })
}

/// Monte Carlo logical error rate; deterministic in `seed`.
///
/// # Safety
/// `c` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cecsim_estimate_rate(
    c: *const CecsimCircuit,
    model_kind: CecsimModel,
    gate_noise: CecsimGateNoise,
    p: f64,
    shots: u64,
    seed: u64,
    out: *mut CecsimRate,
) -> CecsimStatus {
    guard(|| {
        let c = circuit_ref(c)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if shots == 0 {
            return Err(Failure(
                CecsimStatus::InvalidArgument,
                "shots must be at least 1".into(),
            ));
        }
        let r = estimate_rate(&c.circuit, &model(p, model_kind, gate_noise)?, shots, seed);
        *out = CecsimRate {
            p: r.p,
            shots: r.shots,
            failures: r.failures,
            p_log: r.p_log,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
        };
        Ok(())
    })
}

/// Runs one round with explicit faults and an optional pre-round data error
/// (`inject` may be null) and writes the logical class of the outcome.
///
/// # Safety
/// `faults` must point to `num_faults` entries (or be null when zero);
/// `out_class` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cecsim_run_round(
    c: *const CecsimCircuit,
    faults: *const CecsimFault,
    num_faults: usize,
    inject: *const c_char,
    out_class: *mut CecsimClass,
) -> CecsimStatus {
    guard(|| {
        let c = circuit_ref(c)?;
        let out = out_class.as_mut().ok_or_else(|| null("out_class"))?;
        let specs = match (faults.is_null(), num_faults) {
            (_, 0) => &[][..],
            (true, _) => return Err(null("faults")),
            (false, n) => std::slice::from_raw_parts(faults, n),
        };
        let events = specs
            .iter()
            .map(|f| {
                Ok(FaultEvent {
                    location: f.location,
                    pauli: pauli(str_arg(f.pauli, "fault pauli")?)?,
                })
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        let inject = if inject.is_null() {
            None
        } else {
            Some(pauli(str_arg(inject, "inject")?)?)
        };
        let outcome = c.engine.run(&events, inject).map_err(|e| {
            let status = match e {
                EngineError::UnknownLocation(_) => CecsimStatus::UnknownLocation,
                _ => CecsimStatus::InvalidArgument,
            };
            Failure(status, e.to_string())
        })?;
        *out = match outcome.cls {
            LogicalClass::I => CecsimClass::I,
            LogicalClass::X => CecsimClass::X,
            LogicalClass::Z => CecsimClass::Z,
            LogicalClass::Y => CecsimClass::Y,
        };
        Ok(())
    })
}
