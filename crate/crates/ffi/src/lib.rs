//! C ABI for `torus-recur`.
//!
//! Every entry point returns a [`TrStatus`]. On failure the message is
//! available from [`tr_last_error`] on the same thread. Strings returned
//! through out-pointers are owned by the caller and released with
//! [`tr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};

use torus_recur::exact::HyperbolicMap;
use torus_recur::geometry::{membership, RecurrenceConfig};
use torus_recur::lab::{dim_formula, riesz_energy_2d, Sampler};
use torus_recur::periodic::enumerate_periodic;
use torus_recur::Error;

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Domain = 3,
    CapExceeded = 4,
    Panic = 5,
}

/// Opaque handle to a normalized hyperbolic map.
pub struct TrMap {
    map: HyperbolicMap,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TrStatus {
    match e.exit_code() {
        1 => TrStatus::InvalidInput,
        3 => TrStatus::CapExceeded,
        _ => TrStatus::Domain,
    }
}

fn guard<F: FnOnce() -> Result<(), TrStatus> + UnwindSafe>(f: F) -> TrStatus {
    set_error("");
    match catch_unwind(f) {
        Ok(Ok(())) => TrStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            TrStatus::Panic
        }
    }
}

fn fail(e: Error) -> TrStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null() -> TrStatus {
    set_error("null pointer argument");
    TrStatus::NullPointer
}

unsafe fn map_ref<'a>(m: *const TrMap) -> Result<&'a HyperbolicMap, TrStatus> {
    m.as_ref().map(|m| &m.map).ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), TrStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), TrStatus> {
    let c = CString::new(s).map_err(|_| TrStatus::Panic)?;
    write(out, c.into_raw())
}

fn config(map: &HyperbolicMap, alpha: f64) -> Result<RecurrenceConfig, TrStatus> {
    RecurrenceConfig::exponential(alpha).map(|c| c.with_exponent(map.exponent)).map_err(fail)
}

/// Message for the last failed call on this thread. Empty after success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn tr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a map from the row-major matrix `[[a, b], [c, d]]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tr_map_new(a: i64, b: i64, c: i64, d: i64, out: *mut *mut TrMap) -> TrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let map = HyperbolicMap::from_entries([a, b, c, d]).map_err(fail)?;
        write(out, Box::into_raw(Box::new(TrMap { map })))
    })
}

/// # Safety
/// `map` must come from [`tr_map_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tr_map_free(map: *mut TrMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Power `k` such that the stored map is `A^k` (1 or 2).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tr_map_exponent(map: *const TrMap, out: *mut u32) -> TrStatus {
    guard(|| {
        let m = map_ref(map)?;
        write(out, m.exponent)
    })
}

/// `det(A^n - I)` of the normalized map as a decimal string.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tr_map_h(map: *const TrMap, n: u32, out: *mut *mut c_char) -> TrStatus {
    guard(|| {
        let m = map_ref(map)?;
        write_string(out, m.h(n).to_string())
    })
}

/// `tr(A^n)` of the normalized map as a decimal string.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tr_map_trace_power(map: *const TrMap, n: u32, out: *mut *mut c_char) -> TrStatus {
    guard(|| {
        let m = map_ref(map)?;
        write_string(out, m.trace_power(n).to_string())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tr_map_log_lambda(map: *const TrMap, out: *mut f64) -> TrStatus {
    guard(|| {
        let m = map_ref(map)?;
        write(out, m.log_lambda().to_f64())
    })
}

/// Points of period `n` as a JSON array of `["x", "y"]` fractions.
/// Fails with `CAP_EXCEEDED` when there are more than `cap` points.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tr_map_periodic_points_json(
    map: *const TrMap,
    n: u32,
    cap: u64,
    out: *mut *mut c_char,
) -> TrStatus {
    guard(|| {
        let m = map_ref(map)?;
        if out.is_null() {
            return Err(null());
        }
        let set = enumerate_periodic(m, n, cap).map_err(fail)?;
        let pts: Vec<[String; 2]> = set.points.iter().map(|p| [p.x.to_string(), p.y.to_string()]).collect();
        write_string(out, serde_json::to_string(&pts).map_err(|e| fail(e.into()))?)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Critical exponents `s0` (planar) and `s1` (slice) for rate `alpha`.
///
/// # Safety
/// Out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tr_dim_formula(alpha: f64, log_lambda: f64, s0: *mut f64, s1: *mut f64) -> TrStatus {
    guard(|| {
        if s0.is_null() || s1.is_null() {
            return Err(null());
        }
        let f = dim_formula(alpha, log_lambda).map_err(fail)?;
        write(s0, f.s0)?;
        write(s1, f.s1)
    })
}

/// Whether `(x, y)` lies in layer `n` for the rate `exp(-alpha n)`.
/// Writes 1 or 0.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tr_membership(
    map: *const TrMap,
    alpha: f64,
    n: u32,
    x: f64,
    y: f64,
    out: *mut i32,
) -> TrStatus {
    guard(|| {
        let m = map_ref(map)?;
        let cfg = config(m, alpha)?;
        let inside = membership(m, &cfg, n, [x, y]).map_err(fail)?;
        write(out, inside as i32)
    })
}

/// Riesz `s`-energy of the odd layer `n`. `stratified` selects the
/// stratified sampler when nonzero.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tr_energy_2d(
    map: *const TrMap,
    alpha: f64,
    n: u32,
    s: f64,
    stratified: i32,
    samples: u64,
    seed: u64,
    estimate: *mut f64,
    stderr: *mut f64,
) -> TrStatus {
    guard(|| {
        let m = map_ref(map)?;
        if estimate.is_null() || stderr.is_null() {
            return Err(null());
        }
        let cfg = config(m, alpha)?;
        let sampler = if stratified != 0 { Sampler::Stratified } else { Sampler::Plain };
        let r = riesz_energy_2d(m, &cfg, n, s, sampler, samples, seed).map_err(fail)?;
        write(estimate, r.estimate)?;
        write(stderr, r.stderr)
    })
}

/// Copies the last error into an owned Rust string. For tests and Rust callers.
pub fn last_error_string() -> String {
    // SAFETY: tr_last_error always returns a valid NUL-terminated pointer.
    unsafe { CStr::from_ptr(tr_last_error()) }.to_string_lossy().into_owned()
}
