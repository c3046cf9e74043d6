//! C ABI for `lietype`.
//!
//! Every fallible function returns an [`LtStatus`]; on failure the message
//! and machine-readable code of the last error on the calling thread are
//! available from [`lt_last_error_message`] and [`lt_last_error_code`].
//! Datum handles are opaque and freed with [`lt_datum_free`]; strings
//! returned through `char **` out-parameters are freed with [`lt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lietype::cohomology::em_collapse_check;
use lietype::fixedpoint::fixed_datum;
use lietype::invariants::{cap_from_env, degrees_with_cap, enumerate_weyl};
use lietype::padic::{mult_order, unit_valuation, untwist_factor, PAdicUnit, Valuation, DEFAULT_PRECISION};
use lietype::pipeline::{
    classification_key, datum_from_label, fundamental_class_verdict, parse_tau, parse_unit, tezuka_report, untwist,
    VerdictStatus,
};
use lietype::rootdata::RootDatum;
use lietype::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InputError = 3,
    ComputationError = 4,
    CapExceeded = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Outcome of [`lt_verdict`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LtVerdict {
    GuaranteedThmExamples = 0,
    GuaranteedThmExamples2 = 1,
    Unknown = 2,
}

/// Opaque root datum handle.
pub struct LtDatum {
    inner: RootDatum,
}

struct LastError {
    code: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn set_error(code: &str, message: &str) {
    let clean = |s: &str| CString::new(s.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(LastError { code: clean(code), message: clean(message) }));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Failure {
    Null,
    Utf8,
    BufferTooSmall,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Run `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LtStatus::Ok,
        Ok(Err(Failure::Null)) => {
            set_error("NULL_POINTER", "a required pointer argument was null");
            LtStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_error("INVALID_UTF8", "a string argument was not valid UTF-8");
            LtStatus::InvalidUtf8
        }
        Ok(Err(Failure::BufferTooSmall)) => {
            set_error("BUFFER_TOO_SMALL", "the output buffer is too small");
            LtStatus::BufferTooSmall
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.code(), &e.to_string());
            match e {
                Error::CapExceeded { .. } => LtStatus::CapExceeded,
                e if e.is_input_error() => LtStatus::InputError,
                _ => LtStatus::ComputationError,
            }
        }
        Err(_) => {
            set_error("PANIC", "internal panic");
            LtStatus::Panic
        }
    }
}

/// # Safety
/// `s` is null or a NUL-terminated string valid for reads.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null);
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Utf8)
}

/// # Safety
/// `d` is null or a live handle from this library.
unsafe fn read_datum<'a>(d: *const LtDatum) -> Result<&'a RootDatum, Failure> {
    d.as_ref().map(|h| &h.inner).ok_or(Failure::Null)
}

/// # Safety
/// `out` is null or valid for writes.
unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null);
    }
    out.write(v);
    Ok(())
}

/// # Safety
/// `out` is null or valid for writes.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure::Lib(Error::Inconsistent("string contains NUL".into())))?;
    write(out, c.into_raw())
}

/// # Safety
/// `out` is null or valid for writes.
unsafe fn write_handle(out: *mut *mut LtDatum, d: RootDatum) -> Result<(), Failure> {
    write(out, Box::into_raw(Box::new(LtDatum { inner: d })))
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string(v).map_err(|e| Failure::Lib(Error::Inconsistent(e.to_string())))
}

fn precision(p: u32) -> Option<u32> {
    (p != 0).then_some(p)
}

fn unit(q: i64, ell: u64, prec: u32) -> Result<PAdicUnit, Failure> {
    Ok(PAdicUnit::new(q as i128, ell, precision(prec).unwrap_or(DEFAULT_PRECISION))?)
}

/// Message of the last error on this thread, or null. Valid until the next
/// call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Stable code of the last error on this thread (for example `CAP_EXCEEDED`), or null.
#[no_mangle]
pub extern "C" fn lt_last_error_code() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |e| e.code.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn lt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a datum from a label such as `A2`, `B3ad`, `T1xD4` or `GL3`.
///
/// # Safety
/// `label` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_datum_from_label(label: *const c_char, out: *mut *mut LtDatum) -> LtStatus {
    guard(|| write_handle(out, datum_from_label(read_str(label)?)?))
}

/// Parse a datum file (JSON text).
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_datum_from_json(text: *const c_char, out: *mut *mut LtDatum) -> LtStatus {
    guard(|| write_handle(out, RootDatum::from_json_str(read_str(text)?)?))
}

/// Free a datum handle. Null is ignored.
///
/// # Safety
/// `d` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lt_datum_free(d: *mut LtDatum) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Free a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `d` is a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_datum_rank(d: *const LtDatum, out: *mut usize) -> LtStatus {
    guard(|| write(out, read_datum(d)?.rank()))
}

/// The datum in datum-file JSON form.
///
/// # Safety
/// `d` is a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_datum_to_json(d: *const LtDatum, out: *mut *mut c_char) -> LtStatus {
    guard(|| write_string(out, read_datum(d)?.to_canonical_json()))
}

/// Fundamental degrees in ascending order. `len` receives the number of
/// degrees; if `capacity` is smaller, nothing is written to `buf` and
/// `LT_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `d` is a live handle; `buf` is valid for `capacity` writes (or null when
/// `capacity` is 0); `len` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_degrees(d: *const LtDatum, buf: *mut u32, capacity: usize, len: *mut usize) -> LtStatus {
    guard(|| {
        let deg = degrees_with_cap(read_datum(d)?, cap_from_env())?;
        write(len, deg.degrees.len())?;
        if capacity < deg.degrees.len() {
            return Err(Failure::BufferTooSmall);
        }
        if !deg.degrees.is_empty() {
            if buf.is_null() {
                return Err(Failure::Null);
            }
            ptr::copy_nonoverlapping(deg.degrees.as_ptr(), buf, deg.degrees.len());
        }
        Ok(())
    })
}

/// Order of the Weyl group (product of the degrees).
///
/// # Safety
/// `d` is a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_weyl_order(d: *const LtDatum, out: *mut u64) -> LtStatus {
    guard(|| {
        let order = degrees_with_cap(read_datum(d)?, cap_from_env())?.product();
        write(out, u64::try_from(order).map_err(|_| Error::Overflow("Weyl group order"))?)
    })
}

/// Fixed-point datum of the twisting `tau` (see the CLI's `--tau` syntax)
/// at the prime `ell`. `precision` 0 selects the default.
///
/// # Safety
/// `d` is a live handle; `tau` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_fixed_datum(
    d: *const LtDatum,
    tau: *const c_char,
    ell: u64,
    precision_k: u32,
    out: *mut *mut LtDatum,
) -> LtStatus {
    guard(|| {
        let d = read_datum(d)?;
        let t = parse_tau(d, read_str(tau)?, ell, precision(precision_k))?;
        let e = enumerate_weyl(d, cap_from_env())?;
        write_handle(out, fixed_datum(d, &e, &t, ell)?.datum)
    })
}

/// Untwisting result as JSON, including the classification key when the
/// valuation is finite.
///
/// # Safety
/// `d` is a live handle; `tau` and `q` are NUL-terminated strings; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_untwist_json(
    d: *const LtDatum,
    tau: *const c_char,
    q: *const c_char,
    ell: u64,
    precision_k: u32,
    out: *mut *mut c_char,
) -> LtStatus {
    guard(|| {
        let d = read_datum(d)?;
        let t = parse_tau(d, read_str(tau)?, ell, precision(precision_k))?;
        let q = parse_unit(read_str(q)?, ell, precision(precision_k))?;
        let r = untwist(d, &t, &q, cap_from_env())?;
        let mut v = serde_json::to_value(&r).map_err(|e| Error::Inconsistent(e.to_string()))?;
        if let Ok(k) = classification_key(&r) {
            v["classification_key"] = serde_json::to_value(k).map_err(|e| Error::Inconsistent(e.to_string()))?;
        }
        write_string(out, json(&v)?)
    })
}

/// Tezuka report as JSON, with series truncated at degree `trunc`.
///
/// # Safety
/// `d` is a live handle; `tau` and `q` are NUL-terminated strings; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_tezuka_json(
    d: *const LtDatum,
    tau: *const c_char,
    q: *const c_char,
    ell: u64,
    precision_k: u32,
    trunc: usize,
    out: *mut *mut c_char,
) -> LtStatus {
    guard(|| {
        let d = read_datum(d)?;
        let t = parse_tau(d, read_str(tau)?, ell, precision(precision_k))?;
        let q = parse_unit(read_str(q)?, ell, precision(precision_k))?;
        write_string(out, json(&tezuka_report(d, &t, &q, trunc, cap_from_env())?)?)
    })
}

/// Fundamental-class verdict for a labeled datum.
///
/// # Safety
/// `d` is a live handle; `tau` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_verdict(
    d: *const LtDatum,
    tau: *const c_char,
    ell: u64,
    precision_k: u32,
    out: *mut LtVerdict,
) -> LtStatus {
    guard(|| {
        let d = read_datum(d)?;
        let t = parse_tau(d, read_str(tau)?, ell, precision(precision_k))?;
        let v = match fundamental_class_verdict(d, &t, ell)?.status {
            VerdictStatus::GuaranteedThmExamples => LtVerdict::GuaranteedThmExamples,
            VerdictStatus::GuaranteedThmExamples2 => LtVerdict::GuaranteedThmExamples2,
            VerdictStatus::Unknown => LtVerdict::Unknown,
        };
        write(out, v)
    })
}

/// `q = zeta * q'` modulo `ell^precision`: the order `e` of `q` mod `ell`,
/// the Teichmüller lift `zeta` and `q'`, as residues in `[0, ell^k)`.
///
/// # Safety
/// The out-pointers are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_padic_untwist(
    q: i64,
    ell: u64,
    precision_k: u32,
    e: *mut u64,
    zeta: *mut u64,
    q_prime: *mut u64,
) -> LtStatus {
    guard(|| {
        let f = untwist_factor(&unit(q, ell, precision_k)?);
        write(e, f.e)?;
        write(zeta, f.zeta.residue())?;
        write(q_prime, f.q_prime.residue())
    })
}

/// Multiplicative order of `q` modulo `ell`.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_mult_order(q: i64, ell: u64, precision_k: u32, out: *mut u64) -> LtStatus {
    guard(|| write(out, mult_order(&unit(q, ell, precision_k)?)))
}

/// `v_ell(u - 1)`, or -1 when `u = 1` at the working precision.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_unit_valuation(u: i64, ell: u64, precision_k: u32, out: *mut i32) -> LtStatus {
    guard(|| {
        let v = match unit_valuation(&unit(u, ell, precision_k)?) {
            Valuation::Finite(v) => v as i32,
            Valuation::AtPrecision => -1,
        };
        write(out, v)
    })
}

/// Whether the Koszul Tor totals match `prod (1 + t^{2d-1})/(1 - t^{2d})`
/// through degree `trunc` over `F_ell`.
///
/// # Safety
/// `degrees` is valid for `count` reads (or null when `count` is 0); `passed` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lt_em_collapse_check(
    degrees: *const u32,
    count: usize,
    trunc: usize,
    ell: u64,
    passed: *mut bool,
) -> LtStatus {
    guard(|| {
        let degs: &[u32] = if count == 0 {
            &[]
        } else if degrees.is_null() {
            return Err(Failure::Null);
        } else {
            std::slice::from_raw_parts(degrees, count)
        };
        write(passed, em_collapse_check(degs, trunc, ell)?.passed)
    })
}
