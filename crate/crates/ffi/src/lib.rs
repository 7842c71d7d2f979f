//! C ABI over `antisym`.
//!
//! Every function returns an [`AntisymStatus`]; on failure the message is kept
//! per thread and can be copied out with [`antisym_last_error_message`].
//! Families are opaque heap objects released with [`antisym_family_free`].
//! Complex arrays are passed as separate real and imaginary buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use antisym::{
    classify_symmetries, find_exceptional_points, first_order_corrections, load_graph,
    resolve_model, Error, HamiltonianFamily,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntisymStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Solver = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque handle to a Hamiltonian family.
pub struct AntisymFamily {
    inner: HamiltonianFamily,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AntisymSymmetryCounts {
    pub commuting: usize,
    pub conjugating: usize,
    pub parities: usize,
    pub group_order: usize,
    pub class_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(AntisymStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => AntisymStatus::Parse,
            _ if e.is_solver_failure() => AntisymStatus::Solver,
            _ => AntisymStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: AntisymStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AntisymStatus {
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(fail(AntisymStatus::Panic, format!("internal panic: {msg}")))
    });
    match outcome {
        Ok(()) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            AntisymStatus::Ok
        }
        Err(Failure(status, msg)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = msg);
            status
        }
    }
}

unsafe fn handle<'a>(ptr: *const AntisymFamily) -> Result<&'a HamiltonianFamily, Failure> {
    ptr.as_ref()
        .map(|f| &f.inner)
        .ok_or_else(|| fail(AntisymStatus::NullPointer, "family handle is null"))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(fail(AntisymStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        fail(
            AntisymStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn out_slice<'a, T>(
    ptr: *mut T,
    len: usize,
    needed: usize,
    what: &str,
) -> Result<&'a mut [T], Failure> {
    if ptr.is_null() {
        return Err(fail(AntisymStatus::NullPointer, format!("{what} is null")));
    }
    if len < needed {
        return Err(fail(
            AntisymStatus::BufferTooSmall,
            format!("{what} holds {len} values, {needed} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, needed))
}

unsafe fn store<T>(ptr: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(fail(AntisymStatus::NullPointer, format!("{what} is null")));
    }
    ptr.write(value);
    Ok(())
}

/// Copies `s` with a trailing NUL; `needed` receives the full size in bytes.
unsafe fn copy_string(
    s: &str,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> Result<(), Failure> {
    let size = s.len() + 1;
    if !needed.is_null() {
        needed.write(size);
    }
    let out = out_slice(buf, len, size, "string buffer")?;
    for (dst, src) in out.iter_mut().zip(s.bytes()) {
        *dst = src as c_char;
    }
    out[size - 1] = 0;
    Ok(())
}

fn boxed(inner: HamiltonianFamily) -> *mut AntisymFamily {
    Box::into_raw(Box::new(AntisymFamily { inner }))
}

/// Creates a built-in model such as `"ring4"`, `"chain6"` or `"ho2"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn antisym_family_builtin(
    name: *const c_char,
    out: *mut *mut AntisymFamily,
) -> AntisymStatus {
    guard(|| {
        let name = text(name, "name")?;
        let f = resolve_model(name)?;
        store(out, boxed(f), "out")
    })
}

/// Parses a lattice description (`{"n": .., "edges": [[i, j, w], ..], "signature": [..]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn antisym_family_from_json(
    json: *const c_char,
    out: *mut *mut AntisymFamily,
) -> AntisymStatus {
    guard(|| {
        let json = text(json, "json")?;
        let graph = load_graph(json)?;
        store(out, boxed(HamiltonianFamily::new(graph)), "out")
    })
}

/// Releases a family. Null is ignored.
///
/// # Safety
/// `family` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn antisym_family_free(family: *mut AntisymFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Number of sites, or 0 for a null handle.
///
/// # Safety
/// `family` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn antisym_family_size(family: *const AntisymFamily) -> usize {
    family.as_ref().map_or(0, |f| f.inner.n())
}

/// Writes `H(gamma)` row-major into `re` and `im`, each of length `len ≥ n²`.
///
/// # Safety
/// `re` and `im` must each point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn antisym_hamiltonian_at(
    family: *const AntisymFamily,
    gamma: f64,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> AntisymStatus {
    guard(|| {
        let f = handle(family)?;
        if !gamma.is_finite() {
            return Err(fail(AntisymStatus::InvalidArgument, "gamma must be finite"));
        }
        let h = f.hamiltonian_at(gamma);
        let needed = f.n() * f.n();
        let re = out_slice(re, len, needed, "re")?;
        let im = out_slice(im, len, needed, "im")?;
        for (k, z) in h.as_slice().iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Eigenvalues of `H(gamma)` in canonical order (ascending real part, then
/// imaginary part) into `re` and `im`, each of length `len ≥ n`.
///
/// # Safety
/// `re` and `im` must each point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn antisym_eigenvalues(
    family: *const AntisymFamily,
    gamma: f64,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> AntisymStatus {
    guard(|| {
        let f = handle(family)?;
        if !gamma.is_finite() {
            return Err(fail(AntisymStatus::InvalidArgument, "gamma must be finite"));
        }
        let s = antisym::eigenvalues(&f.hamiltonian_at(gamma))?;
        let re = out_slice(re, len, s.len(), "re")?;
        let im = out_slice(im, len, s.len(), "im")?;
        for (k, z) in s.values().iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Symmetry census and the size of the group they generate.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn antisym_symmetry_counts(
    family: *const AntisymFamily,
    out: *mut AntisymSymmetryCounts,
) -> AntisymStatus {
    guard(|| {
        let report = classify_symmetries(handle(family)?)?;
        let counts = AntisymSymmetryCounts {
            commuting: report.commuting.len(),
            conjugating: report.conjugating.len(),
            parities: report.parities.len(),
            group_order: report.group0.order(),
            class_count: report.group0.class_count(),
        };
        store(out, counts, "out")
    })
}

/// Name of the symmetry group, NUL-terminated. `needed` (may be null)
/// receives the size including the NUL, also when the buffer is too small.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn antisym_group_name(
    family: *const AntisymFamily,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> AntisymStatus {
    guard(|| {
        let report = classify_symmetries(handle(family)?)?;
        copy_string(&report.group0.name, buf, len, needed)
    })
}

/// First-order prediction: true if some level acquires an imaginary slope.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn antisym_extremely_broken(
    family: *const AntisymFamily,
    out: *mut bool,
) -> AntisymStatus {
    guard(|| {
        let report = first_order_corrections(handle(family)?)?;
        store(out, report.extremely_broken, "out")
    })
}

/// Exceptional points on `[lo, hi]` scanned with `grid` cells, ascending.
/// `count` receives the number found; they are written to `out` only if
/// `cap >= count`, otherwise the status is `BufferTooSmall`.
///
/// # Safety
/// `out` must point to `cap` writable doubles; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn antisym_exceptional_points(
    family: *const AntisymFamily,
    lo: f64,
    hi: f64,
    grid: usize,
    out: *mut f64,
    cap: usize,
    count: *mut usize,
) -> AntisymStatus {
    guard(|| {
        let search = find_exceptional_points(handle(family)?, lo, hi, grid)?;
        store(count, search.points.len(), "count")?;
        if search.points.is_empty() {
            return Ok(());
        }
        let out = out_slice(out, cap, search.points.len(), "out")?;
        for (dst, p) in out.iter_mut().zip(&search.points) {
            *dst = p.gamma;
        }
        Ok(())
    })
}

/// Copies the calling thread's last error message (empty after a success).
/// Returns the size needed including the NUL; nothing is written if `len`
/// is smaller than that.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn antisym_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let size = msg.len() + 1;
        if !buf.is_null() && len >= size {
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, msg.len());
            buf.add(msg.len()).write(0);
        }
        size
    })
}
