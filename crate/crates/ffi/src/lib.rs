//! C ABI over `bosonic-core`.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `*_free` function. Every fallible call returns a
//! [`BosonicStatus`]; on failure [`bosonic_last_error_message`] describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bosonic_core::circuit::{circuit_from_json, Circuit};
use bosonic_core::engine::{run_shots_with, simulate_with, SimOptions, StateVector};
use bosonic_core::fock::FockSpace;
use bosonic_core::wigner::{wigner_of_state, PhaseSpaceGrid};
use bosonic_core::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BosonicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    SimulationError = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// A parsed, validated circuit.
pub struct BosonicCircuit(Circuit);

/// A simulated statevector.
pub struct BosonicState(StateVector);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn status_of(err: &Error) -> BosonicStatus {
    match err {
        Error::Parse { .. } | Error::InvalidGrid(_) => BosonicStatus::ParseError,
        Error::WireCapExceeded { .. }
        | Error::NonUnitaryGate(_)
        | Error::ZeroProbabilityBranch(_)
        | Error::NonSkewHermitian { .. } => BosonicStatus::SimulationError,
        _ => BosonicStatus::ValidationError,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (BosonicStatus, String)>) -> BosonicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BosonicStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BosonicStatus::Panic
        }
    }
}

fn core(err: Error) -> (BosonicStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (BosonicStatus, String) {
    (BosonicStatus::NullPointer, format!("{what} is null"))
}

fn space_for(circuit: &Circuit, qubits_per_mode: u32) -> Result<FockSpace, (BosonicStatus, String)> {
    if qubits_per_mode == 0 {
        Ok(circuit.space())
    } else {
        FockSpace::new(qubits_per_mode).map_err(core)
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bosonic_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bosonic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses circuit JSON into a new handle written to `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bosonic_circuit_from_json(json: *const c_char, out: *mut *mut BosonicCircuit) -> BosonicStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (BosonicStatus::InvalidUtf8, e.to_string()))?;
        let circuit = circuit_from_json(text).map_err(core)?;
        *out = Box::into_raw(Box::new(BosonicCircuit(circuit)));
        Ok(())
    })
}

/// # Safety
/// `circuit` must come from [`bosonic_circuit_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bosonic_circuit_free(circuit: *mut BosonicCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Number of qumodes, qubits and classical bits of a circuit.
///
/// # Safety
/// `circuit` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn bosonic_circuit_shape(
    circuit: *const BosonicCircuit,
    qumodes: *mut usize,
    qubits: *mut usize,
    cbits: *mut usize,
) -> BosonicStatus {
    guard(|| {
        let c = &circuit.as_ref().ok_or_else(|| null("circuit"))?.0;
        for (dst, v) in [(qumodes, c.num_qumodes()), (qubits, c.num_qubits()), (cbits, c.num_cbits())] {
            if !dst.is_null() {
                *dst = v;
            }
        }
        Ok(())
    })
}

/// Simulates one shot. `qubits_per_mode == 0` keeps the circuit's truncation.
///
/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bosonic_simulate(
    circuit: *const BosonicCircuit,
    qubits_per_mode: u32,
    seed: u64,
    out: *mut *mut BosonicState,
) -> BosonicStatus {
    guard(|| {
        let c = &circuit.as_ref().ok_or_else(|| null("circuit"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let space = space_for(c, qubits_per_mode)?;
        let (state, _) = simulate_with(c, space, seed, &SimOptions::default()).map_err(core)?;
        *out = Box::into_raw(Box::new(BosonicState(state)));
        Ok(())
    })
}

/// Runs `shots` shots and writes a JSON object
/// `{"counts": {...}, "shots": n, "seed": s, "endianness": "little"}` to `*out_json`.
/// Free it with [`bosonic_string_free`]. `threads == 0` uses all cores.
///
/// # Safety
/// `circuit` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bosonic_run_shots(
    circuit: *const BosonicCircuit,
    qubits_per_mode: u32,
    shots: u64,
    seed: u64,
    threads: usize,
    out_json: *mut *mut c_char,
) -> BosonicStatus {
    guard(|| {
        let c = &circuit.as_ref().ok_or_else(|| null("circuit"))?.0;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let space = space_for(c, qubits_per_mode)?;
        let opts = SimOptions {
            threads: (threads > 0).then_some(threads),
            ..SimOptions::default()
        };
        let (result, _) = run_shots_with(c, space, shots, seed, &opts).map_err(core)?;
        let text = serde_json::to_string(&result).map_err(|e| (BosonicStatus::Panic, e.to_string()))?;
        *out_json = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bosonic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `state` must come from [`bosonic_simulate`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bosonic_state_free(state: *mut BosonicState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of complex amplitudes in the state; 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bosonic_state_dim(state: *const BosonicState) -> usize {
    state.as_ref().map_or(0, |s| s.0.amplitudes().len())
}

/// Copies amplitudes as interleaved `(re, im)` pairs; `len` counts doubles
/// and must be at least `2 * dim`.
///
/// # Safety
/// `state` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bosonic_state_amplitudes(state: *const BosonicState, out: *mut f64, len: usize) -> BosonicStatus {
    guard(|| {
        let s = &state.as_ref().ok_or_else(|| null("state"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let amps = s.amplitudes();
        if len < 2 * amps.len() {
            return Err((
                BosonicStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", 2 * amps.len()),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(out, 2 * amps.len());
        for (pair, a) in dst.chunks_exact_mut(2).zip(amps) {
            pair[0] = a.re;
            pair[1] = a.im;
        }
        Ok(())
    })
}

/// Wigner function of `qumode` on a square grid `[min, max]²` with `points`
/// per axis, written x-major into `out` (`len ≥ points²`).
///
/// # Safety
/// `state` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bosonic_wigner(
    state: *const BosonicState,
    qumode: usize,
    min: f64,
    max: f64,
    points: usize,
    out: *mut f64,
    len: usize,
) -> BosonicStatus {
    guard(|| {
        let s = &state.as_ref().ok_or_else(|| null("state"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = PhaseSpaceGrid::square(min, max, points).map_err(core)?;
        let needed = points * points;
        if len < needed {
            return Err((BosonicStatus::BufferTooSmall, format!("need {needed} doubles, got {len}")));
        }
        let w = wigner_of_state(s, qumode, &grid).map_err(core)?;
        std::slice::from_raw_parts_mut(out, needed).copy_from_slice(&w.values);
        Ok(())
    })
}
