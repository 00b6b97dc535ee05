//! C ABI for the octic engine.
//!
//! The interface follows the usual conventions for C bindings:
//!
//! * heavyweight state lives behind opaque handles ([`OcticTables`],
//!   [`OcticMatches`]) created and destroyed by paired functions;
//! * every fallible call returns an [`OcticStatus`] code and reports
//!   results through out-pointers;
//! * on failure, [`octic_last_error`] returns a thread-local message
//!   that stays valid until the next `octic_*` call on the same thread;
//! * no call panics across the boundary and no call takes ownership of
//!   caller memory.
//!
//! Coefficient vectors are arrays of 15 `int64_t` in the fixed basis
//! order B, R, U, C, H, W, E, G, S, T, A, D, I, O, N. Count vectors are
//! arrays of 25 `uint64_t`, one per prime in the order returned by
//! [`octic_primes`]. The generated header is `include/octic.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use octic::count::{Scheme, TableSet};
use octic::matcher::best_matches;
use octic::newform::{default_twists, load_table};
use octic::{Error, Octic};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcticStatus {
    /// The call succeeded.
    OcticOk = 0,
    /// A pointer was null or an argument value was out of range.
    OcticInvalidArgument = 1,
    /// An input file or table failed validation.
    OcticDataError = 2,
    /// The filesystem failed.
    OcticIoError = 3,
}

/// Aggregation scheme selector for table construction. Passed as a
/// plain `uint32_t` so that out-of-range values can be rejected instead
/// of being undefined behavior.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcticScheme {
    /// Group points by their exact monomial key.
    OcticSchemeExactKey = 0,
    /// Group by the key up to eighth-power cofactors.
    OcticSchemeModEighthPowers = 1,
    /// Group by the key up to square cofactors (smallest tables).
    OcticSchemeModSquares = 2,
}

/// Number of supported primes (2 through 97).
pub const OCTIC_PRIME_COUNT: usize = 25;

/// Number of basis coefficients in an input vector.
pub const OCTIC_COEFF_COUNT: usize = 15;

/// Opaque handle over the 25 per-prime aggregate count tables.
pub struct OcticTables {
    inner: TableSet,
}

/// Opaque list of (label, twist, agreement) matches, best first.
pub struct OcticMatches {
    labels: Vec<CString>,
    twists: Vec<i64>,
    agrees: Vec<u32>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).expect("NULs removed");
    });
}

fn fail(e: &Error) -> OcticStatus {
    set_error(&e.to_string());
    match e {
        Error::Io { .. } => OcticStatus::OcticIoError,
        Error::BadTableLine { .. }
        | Error::BadNewform(_)
        | Error::BadCache { .. }
        | Error::BadCheckpoint { .. }
        | Error::Overflow(_) => OcticStatus::OcticDataError,
        _ => OcticStatus::OcticInvalidArgument,
    }
}

fn invalid(msg: &str) -> OcticStatus {
    set_error(msg);
    OcticStatus::OcticInvalidArgument
}

/// Runs a closure, converting panics into a data-error status so that
/// unwinding never crosses the C boundary.
fn guarded(f: impl FnOnce() -> OcticStatus) -> OcticStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            OcticStatus::OcticDataError
        }
    }
}

fn scheme_from(raw: u32) -> Option<Scheme> {
    match raw {
        0 => Some(Scheme::ExactKey),
        1 => Some(Scheme::ModEighthPowers),
        2 => Some(Scheme::ModSquares),
        _ => None,
    }
}

/// Reads a caller-supplied 15-coefficient array into a vector.
///
/// # Safety
/// `coeffs` must point to 15 readable `int64_t`.
unsafe fn octic_from(coeffs: *const i64) -> Option<Octic> {
    if coeffs.is_null() {
        return None;
    }
    let mut c = [0i64; 15];
    c.copy_from_slice(std::slice::from_raw_parts(coeffs, 15));
    Some(Octic::from_coeffs(c))
}

unsafe fn path_from<'a>(ptr: *const c_char) -> Option<&'a Path> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok().map(Path::new)
}

/// Message for the most recent failure on this thread. Never null;
/// empty before the first failure. The pointer is invalidated by the
/// next `octic_*` call on the same thread.
#[no_mangle]
pub extern "C" fn octic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Writes the 25 supported primes (ascending) to `out`.
///
/// # Safety
/// `out` must point to 25 writable `uint32_t`.
#[no_mangle]
pub unsafe extern "C" fn octic_primes(out: *mut u32) -> OcticStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("octic_primes: out is null");
        }
        let dst = std::slice::from_raw_parts_mut(out, OCTIC_PRIME_COUNT);
        dst.copy_from_slice(&octic::field::PRIMES);
        OcticStatus::OcticOk
    })
}

/// Builds all 25 tables in memory. `scheme` is an [`OcticScheme`]
/// value; `threads` 0 means one worker. The handle must be released
/// with [`octic_tables_free`].
///
/// # Safety
/// `out` must point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn octic_tables_build(
    scheme: u32,
    threads: u32,
    out: *mut *mut OcticTables,
) -> OcticStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("octic_tables_build: out is null");
        }
        let Some(scheme) = scheme_from(scheme) else {
            return invalid("octic_tables_build: scheme must be 0, 1, or 2");
        };
        match TableSet::build(scheme, threads.max(1) as usize) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(OcticTables { inner }));
                OcticStatus::OcticOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Loads the tables cached in `dir` (UTF-8 path), building and caching
/// them first if absent — the counterpart of the CLI `tables` command.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a writable slot.
#[no_mangle]
pub unsafe extern "C" fn octic_tables_open(
    dir: *const c_char,
    scheme: u32,
    threads: u32,
    out: *mut *mut OcticTables,
) -> OcticStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("octic_tables_open: out is null");
        }
        let Some(dir) = path_from(dir) else {
            return invalid("octic_tables_open: dir is null or not UTF-8");
        };
        let Some(scheme) = scheme_from(scheme) else {
            return invalid("octic_tables_open: scheme must be 0, 1, or 2");
        };
        if let Err(e) = std::fs::create_dir_all(dir) {
            return fail(&Error::io(
                format!("creating cache dir {}", dir.display()),
                e,
            ));
        }
        match TableSet::load_or_build(dir, scheme, threads.max(1) as usize) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(OcticTables { inner }));
                OcticStatus::OcticOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a handle from [`octic_tables_build`] or
/// [`octic_tables_open`]. Null is a no-op.
///
/// # Safety
/// `tables` must be unused after this call.
#[no_mangle]
pub unsafe extern "C" fn octic_tables_free(tables: *mut OcticTables) {
    if !tables.is_null() {
        drop(Box::from_raw(tables));
    }
}

/// Counts the points of `u² = f` over `F_prime` for the coefficient
/// vector `coeffs` (15 entries, basis order; not all zero).
///
/// # Safety
/// `tables` must be a live handle, `coeffs` 15 readable entries,
/// `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn octic_count(
    tables: *const OcticTables,
    coeffs: *const i64,
    prime: u32,
    out_count: *mut u64,
) -> OcticStatus {
    guarded(|| {
        let Some(t) = tables.as_ref() else {
            return invalid("octic_count: tables is null");
        };
        let Some(v) = octic_from(coeffs) else {
            return invalid("octic_count: coeffs is null");
        };
        if out_count.is_null() {
            return invalid("octic_count: out_count is null");
        }
        if v.is_zero() {
            return fail(&Error::DegenerateOctic);
        }
        match t.inner.count_at(&v, prime) {
            Ok(c) => {
                *out_count = c;
                OcticStatus::OcticOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Counts over all 25 primes at once; `out_counts` receives 25 entries
/// in prime order.
///
/// # Safety
/// As [`octic_count`], with `out_counts` pointing to 25 writable slots.
#[no_mangle]
pub unsafe extern "C" fn octic_count_all(
    tables: *const OcticTables,
    coeffs: *const i64,
    out_counts: *mut u64,
) -> OcticStatus {
    guarded(|| {
        let Some(t) = tables.as_ref() else {
            return invalid("octic_count_all: tables is null");
        };
        let Some(v) = octic_from(coeffs) else {
            return invalid("octic_count_all: coeffs is null");
        };
        if out_counts.is_null() {
            return invalid("octic_count_all: out_counts is null");
        }
        if v.is_zero() {
            return fail(&Error::DegenerateOctic);
        }
        match t.inner.count_vector(&v) {
            Ok(counts) => {
                let dst = std::slice::from_raw_parts_mut(out_counts, OCTIC_PRIME_COUNT);
                dst.copy_from_slice(&counts.0);
                OcticStatus::OcticOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Matches one surface against a newform table file, scanning the
/// default twist set. Matches with at least `threshold` (1..=25)
/// agreeing primes are returned best-first through an [`OcticMatches`]
/// handle, which may be empty and must be released with
/// [`octic_matches_free`].
///
/// # Safety
/// `tables` live handle, `coeffs` 15 readable entries, `forms_path`
/// NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn octic_match_file(
    tables: *const OcticTables,
    coeffs: *const i64,
    forms_path: *const c_char,
    threshold: u32,
    out: *mut *mut OcticMatches,
) -> OcticStatus {
    guarded(|| {
        let Some(t) = tables.as_ref() else {
            return invalid("octic_match_file: tables is null");
        };
        let Some(v) = octic_from(coeffs) else {
            return invalid("octic_match_file: coeffs is null");
        };
        let Some(path) = path_from(forms_path) else {
            return invalid("octic_match_file: forms_path is null or not UTF-8");
        };
        if out.is_null() {
            return invalid("octic_match_file: out is null");
        }
        if v.is_zero() {
            return fail(&Error::DegenerateOctic);
        }
        let records = match load_table(path) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        let counts = match t.inner.count_vector(&v) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        let results = match best_matches(&counts, &records, &default_twists(), threshold) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        let mut m = OcticMatches {
            labels: Vec::with_capacity(results.len()),
            twists: Vec::with_capacity(results.len()),
            agrees: Vec::with_capacity(results.len()),
        };
        for r in results {
            // Labels come from a parsed table line, so they contain no NUL.
            m.labels.push(CString::new(r.label).expect("label without NUL"));
            m.twists.push(r.twist);
            m.agrees.push(r.agree);
        }
        *out = Box::into_raw(Box::new(m));
        OcticStatus::OcticOk
    })
}

/// Number of matches in the list. Null yields 0.
///
/// # Safety
/// `matches` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn octic_matches_len(matches: *const OcticMatches) -> usize {
    match matches.as_ref() {
        Some(m) => m.labels.len(),
        None => 0,
    }
}

/// Label of match `index` (owned by the list, NUL-terminated); null if
/// the index is out of range.
///
/// # Safety
/// `matches` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn octic_matches_label(
    matches: *const OcticMatches,
    index: usize,
) -> *const c_char {
    match matches.as_ref().and_then(|m| m.labels.get(index)) {
        Some(label) => label.as_ptr(),
        None => std::ptr::null(),
    }
}

/// Twist discriminant of match `index`.
///
/// # Safety
/// `matches` live handle or null, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn octic_matches_twist(
    matches: *const OcticMatches,
    index: usize,
    out: *mut i64,
) -> OcticStatus {
    guarded(|| {
        let Some(d) = matches.as_ref().and_then(|m| m.twists.get(index)) else {
            return invalid("octic_matches_twist: null list or index out of range");
        };
        if out.is_null() {
            return invalid("octic_matches_twist: out is null");
        }
        *out = *d;
        OcticStatus::OcticOk
    })
}

/// Agreement count of match `index`.
///
/// # Safety
/// `matches` live handle or null, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn octic_matches_agree(
    matches: *const OcticMatches,
    index: usize,
    out: *mut u32,
) -> OcticStatus {
    guarded(|| {
        let Some(a) = matches.as_ref().and_then(|m| m.agrees.get(index)) else {
            return invalid("octic_matches_agree: null list or index out of range");
        };
        if out.is_null() {
            return invalid("octic_matches_agree: out is null");
        }
        *out = *a;
        OcticStatus::OcticOk
    })
}

/// Releases a match list. Null is a no-op.
///
/// # Safety
/// `matches` must be unused after this call.
#[no_mangle]
pub unsafe extern "C" fn octic_matches_free(matches: *mut OcticMatches) {
    if !matches.is_null() {
        drop(Box::from_raw(matches));
    }
}
