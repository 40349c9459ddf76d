//! C ABI over the sc-lab core: opaque handles, status codes, out-pointers.
//!
//! The generated header lives at `include/sc_lab.h` (regenerated by the
//! build script). Conventions:
//!
//! * every fallible call returns [`sclab_status`] and writes its result
//!   through out-pointers, which are left untouched on failure;
//! * handles created by `*_new` functions are freed with the matching
//!   `*_free`; strings returned through `char**` are freed with
//!   [`sclab_string_free`];
//! * null handle or out-pointer arguments yield `SCLAB_NULL_ARGUMENT`.

#![allow(non_camel_case_types)]

use std::ffi::{c_char, CStr, CString};
use std::sync::Arc;

use sc_lab::compactness::projection_defect_norm;
use sc_lab::loops::{discontinuity_witness, FourierLoop};
use sc_lab::weights::{TableExtension, WeightFunction};
use sc_lab::ScError;

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum sclab_status {
    SCLAB_OK = 0,
    SCLAB_NULL_ARGUMENT = 1,
    SCLAB_INVALID_ARGUMENT = 2,
    SCLAB_DOMAIN_ERROR = 3,
    SCLAB_CONTRACT_ERROR = 4,
    SCLAB_UTF8_ERROR = 5,
    SCLAB_JSON_ERROR = 6,
}

/// Continuation rule for table weights created through this ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum sclab_extension {
    /// last + slope·k; parameter is the slope (> 0)
    SCLAB_EXTENSION_LINEAR = 0,
    /// last · ratio^k; parameter is the ratio (> 1)
    SCLAB_EXTENSION_GEOMETRIC = 1,
}

/// Opaque handle to a weight function.
pub struct sclab_weight {
    inner: Arc<WeightFunction>,
}

/// Opaque handle to a band-limited loop.
pub struct sclab_loop {
    inner: FourierLoop,
}

fn status_of(err: &ScError) -> sclab_status {
    match err {
        ScError::Domain(_) => sclab_status::SCLAB_DOMAIN_ERROR,
        ScError::Contract(_) => sclab_status::SCLAB_CONTRACT_ERROR,
        ScError::Config(_) => sclab_status::SCLAB_INVALID_ARGUMENT,
        ScError::Json(_) => sclab_status::SCLAB_JSON_ERROR,
        ScError::Io(_) => sclab_status::SCLAB_INVALID_ARGUMENT,
    }
}

/// Version string of the underlying library; static storage, do not free.
#[no_mangle]
pub extern "C" fn sclab_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Create the power weight f(ν) = ν^exponent.
///
/// # Safety
/// `name` must point to a NUL-terminated string and `out` must be a valid
/// pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn sclab_weight_power_new(
    name: *const c_char,
    exponent: f64,
    out: *mut *mut sclab_weight,
) -> sclab_status {
    if name.is_null() || out.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        return sclab_status::SCLAB_UTF8_ERROR;
    };
    match WeightFunction::power(name, exponent) {
        Ok(w) => {
            *out = Box::into_raw(Box::new(sclab_weight { inner: Arc::new(w) }));
            sclab_status::SCLAB_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Create a table weight from `len` values continued by the given
/// extension rule.
///
/// # Safety
/// `name` must be NUL-terminated, `values` must point to `len` readable
/// doubles, and `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn sclab_weight_table_new(
    name: *const c_char,
    values: *const f64,
    len: usize,
    extension: sclab_extension,
    parameter: f64,
    out: *mut *mut sclab_weight,
) -> sclab_status {
    if name.is_null() || values.is_null() || out.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        return sclab_status::SCLAB_UTF8_ERROR;
    };
    let values = std::slice::from_raw_parts(values, len).to_vec();
    let extension = match extension {
        sclab_extension::SCLAB_EXTENSION_LINEAR => TableExtension::Linear { slope: parameter },
        sclab_extension::SCLAB_EXTENSION_GEOMETRIC => {
            TableExtension::Geometric { ratio: parameter }
        }
    };
    match WeightFunction::table(name, values, extension) {
        Ok(w) => {
            *out = Box::into_raw(Box::new(sclab_weight { inner: Arc::new(w) }));
            sclab_status::SCLAB_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Evaluate f(ν); indices are 1-based.
///
/// # Safety
/// `weight` must be a live handle from a `sclab_weight_*_new` call and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sclab_weight_eval(
    weight: *const sclab_weight,
    nu: usize,
    out: *mut f64,
) -> sclab_status {
    if weight.is_null() || out.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    match (*weight).inner.eval(nu) {
        Ok(v) => {
            *out = v;
            sclab_status::SCLAB_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Serialize the weight to its JSON form. The returned string must be
/// released with [`sclab_string_free`].
///
/// # Safety
/// `weight` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sclab_weight_to_json(
    weight: *const sclab_weight,
    out: *mut *mut c_char,
) -> sclab_status {
    if weight.is_null() || out.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    let Ok(json) = serde_json::to_string(&*(*weight).inner) else {
        return sclab_status::SCLAB_JSON_ERROR;
    };
    let Ok(cstring) = CString::new(json) else {
        return sclab_status::SCLAB_JSON_ERROR;
    };
    *out = cstring.into_raw();
    sclab_status::SCLAB_OK
}

/// Exact operator norm of the rank-N cutoff defect from the weighted level
/// into the base level, together with the 1/f(N) reference constant.
///
/// # Safety
/// `weight` must be a live handle; `out_exact` and `out_paper` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sclab_projection_defect(
    weight: *const sclab_weight,
    rank: usize,
    out_exact: *mut f64,
    out_paper: *mut f64,
) -> sclab_status {
    if weight.is_null() || out_exact.is_null() || out_paper.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    match projection_defect_norm(rank, &(*weight).inner) {
        Ok(d) => {
            *out_exact = d.exact;
            *out_paper = d.paper_bound;
            sclab_status::SCLAB_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Release a weight handle. Null is a no-op.
///
/// # Safety
/// `weight` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sclab_weight_free(weight: *mut sclab_weight) {
    if !weight.is_null() {
        drop(Box::from_raw(weight));
    }
}

/// Create a loop from interleaved (re, im) coefficient pairs for modes
/// −bandwidth..bandwidth; `reim` must hold 2·(2·bandwidth+1) doubles.
///
/// # Safety
/// `reim` must point to that many readable doubles and `out` must be a
/// valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn sclab_loop_new(
    bandwidth: usize,
    reim: *const f64,
    out: *mut *mut sclab_loop,
) -> sclab_status {
    if reim.is_null() || out.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    let n = 2 * bandwidth + 1;
    let raw = std::slice::from_raw_parts(reim, 2 * n);
    let modes = raw
        .chunks_exact(2)
        .map(|c| num_complex::Complex64::new(c[0], c[1]))
        .collect();
    match FourierLoop::new(bandwidth, modes) {
        Ok(v) => {
            *out = Box::into_raw(Box::new(sclab_loop { inner: v }));
            sclab_status::SCLAB_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Level-k Sobolev norm (Σ (1+ℓ²)^k |v_ℓ|²)^{1/2}.
///
/// # Safety
/// `loop_` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sclab_loop_sobolev_norm(
    loop_: *const sclab_loop,
    level: usize,
    out: *mut f64,
) -> sclab_status {
    if loop_.is_null() || out.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    *out = (*loop_).inner.sobolev_norm(level);
    sclab_status::SCLAB_OK
}

/// New handle holding the shifted loop v(·+τ).
///
/// # Safety
/// `loop_` must be a live handle and `out` a valid pointer to a handle
/// slot.
#[no_mangle]
pub unsafe extern "C" fn sclab_loop_shifted(
    loop_: *const sclab_loop,
    tau: f64,
    out: *mut *mut sclab_loop,
) -> sclab_status {
    if loop_.is_null() || out.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    let shifted = (*loop_).inner.shifted(tau);
    *out = Box::into_raw(Box::new(sclab_loop { inner: shifted }));
    sclab_status::SCLAB_OK
}

/// Closed-form shift defect ‖Ψ_τ v − v‖_{L²}.
///
/// # Safety
/// `loop_` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sclab_loop_shift_defect(
    loop_: *const sclab_loop,
    tau: f64,
    out: *mut f64,
) -> sclab_status {
    if loop_.is_null() || out.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    let rows = sc_lab::loops::compact_open_decay(&(*loop_).inner, &[tau]);
    *out = rows[0].defect;
    sclab_status::SCLAB_OK
}

/// Release a loop handle. Null is a no-op.
///
/// # Safety
/// `loop_` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sclab_loop_free(loop_: *mut sclab_loop) {
    if !loop_.is_null() {
        drop(Box::from_raw(loop_));
    }
}

/// Build the unit step witness for the given τ and grid resolution and
/// report its norm (→ 1) and shift defect (→ √2). Requires (τ/2)·resolution
/// to be an integer.
///
/// # Safety
/// `out_norm` and `out_defect` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sclab_discontinuity_witness(
    tau: f64,
    resolution: usize,
    out_norm: *mut f64,
    out_defect: *mut f64,
) -> sclab_status {
    if out_norm.is_null() || out_defect.is_null() {
        return sclab_status::SCLAB_NULL_ARGUMENT;
    }
    match discontinuity_witness(tau, resolution) {
        Ok(w) => {
            *out_norm = w.norm;
            *out_defect = w.defect;
            sclab_status::SCLAB_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Release a string produced by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string returned by an `sclab_*` call, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn sclab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
