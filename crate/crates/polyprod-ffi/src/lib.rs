//! C ABI for the polytope library.
//!
//! The interface works on opaque handles: `polyprod_eval` turns an
//! expression into a handle, the query functions read it, constructions
//! return fresh handles, and `polyprod_free` releases one. Fallible calls
//! signal failure in-band (null pointer, zero count, negative length) and
//! leave a message for `polyprod_last_error` on the calling thread.
//!
//! Every returned string is owned by the caller and must go back through
//! `polyprod_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use polyprod::report::{describe, factor_lines};
use polyprod::symmetry::flags;
use polyprod::{
    automorphism_group, factor, flag_orbit_count, monodromy_group, parse_eval, product,
    validate_polytope, Polytope, ProductKind,
};

/// Join: glues nothing, ranks add plus one.
pub const POLYPROD_KIND_JOIN: c_int = 0;
/// Cartesian product: identifies least faces, ranks add.
pub const POLYPROD_KIND_CART: c_int = 1;
/// Direct sum: identifies greatest faces, ranks add.
pub const POLYPROD_KIND_DSUM: c_int = 2;
/// Topological product: identifies both ends, ranks add minus one.
/// Operands must have rank at least 2.
pub const POLYPROD_KIND_TOPO: c_int = 3;

/// Sentinel returned by `polyprod_rank` when the handle is null.
pub const POLYPROD_NO_RANK: i32 = i32::MIN;

/// Opaque polytope. Create with `polyprod_eval`, `polyprod_dual` or
/// `polyprod_product`; release with `polyprod_free`.
pub struct PolytopeHandle {
    inner: Polytope,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    // Interior NULs cannot come from our own messages; strip them anyway
    // rather than poison the error channel itself.
    let stored = CString::new(message.replace('\0', " ")).expect("NULs stripped");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::default());
}

fn panic_text(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".to_owned()
    }
}

/// Runs `body`, translating errors and panics into the thread-local
/// message plus `fallback`. A success clears the message.
fn guarded<T>(fallback: T, body: impl FnOnce() -> Result<T, String>) -> T {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(value)) => {
            clear_error();
            value
        }
        Ok(Err(message)) => {
            set_error(&message);
            fallback
        }
        Err(payload) => {
            set_error(&format!("internal error: {}", panic_text(payload)));
            fallback
        }
    }
}

unsafe fn handle_ref<'a>(h: *const PolytopeHandle) -> Result<&'a Polytope, String> {
    h.as_ref()
        .map(|handle| &handle.inner)
        .ok_or_else(|| "null handle".to_owned())
}

fn new_handle(inner: Polytope) -> *mut PolytopeHandle {
    Box::into_raw(Box::new(PolytopeHandle { inner }))
}

fn kind_of(kind: c_int) -> Result<ProductKind, String> {
    match kind {
        POLYPROD_KIND_JOIN => Ok(ProductKind::Join),
        POLYPROD_KIND_CART => Ok(ProductKind::Cartesian),
        POLYPROD_KIND_DSUM => Ok(ProductKind::DirectSum),
        POLYPROD_KIND_TOPO => Ok(ProductKind::Topological),
        _ => Err(format!("unknown product kind {kind}")),
    }
}

fn export_string(s: String) -> Result<*mut c_char, String> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| "output contains an interior NUL".to_owned())
}

/// Evaluates an expression in the CLI grammar (`"prism(gon(5))"`,
/// `"edge ^ 3"`, `"gon(3) topo gon(4)"`, ...) to a new handle.
/// Returns null on a syntax, range or construction error.
///
/// # Safety
/// `expr` must be null or point to a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn polyprod_eval(expr: *const c_char) -> *mut PolytopeHandle {
    guarded(std::ptr::null_mut(), || {
        if expr.is_null() {
            return Err("null expression".to_owned());
        }
        let text = CStr::from_ptr(expr)
            .to_str()
            .map_err(|_| "expression is not valid UTF-8".to_owned())?;
        let p = parse_eval(text).map_err(|e| e.to_string())?;
        Ok(new_handle(p))
    })
}

/// Releases a handle. Null is allowed.
///
/// # Safety
/// `h` must be null or a handle returned by this library that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn polyprod_free(h: *mut PolytopeHandle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Message from the most recent failed call on this thread; the empty
/// string when that call succeeded. The pointer stays valid only until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn polyprod_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Rank of the polytope, or `POLYPROD_NO_RANK` for a null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_rank(h: *const PolytopeHandle) -> i32 {
    guarded(POLYPROD_NO_RANK, || Ok(handle_ref(h)?.rank()))
}

/// Total number of faces, the two improper ones included. 0 on a null
/// handle (a real polytope has at least two faces).
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_face_count(h: *const PolytopeHandle) -> u64 {
    guarded(0, || Ok(handle_ref(h)?.face_count() as u64))
}

/// Number of flags (maximal chains of proper faces). 0 on a null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_flag_count(h: *const PolytopeHandle) -> u64 {
    guarded(0, || Ok(flags(handle_ref(h)?).len() as u64))
}

/// Whether the poset satisfies the polytope axioms. Handles built by
/// this library always do; the check is a diagnostic.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_is_valid(h: *const PolytopeHandle) -> bool {
    guarded(false, || {
        Ok(validate_polytope(handle_ref(h)?.poset()).is_polytope)
    })
}

/// F-vector: counts of faces of rank 0 through rank - 1. Writes up to
/// `cap` entries to `out` and returns the full length, so `cap` = 0
/// sizes the buffer. Returns -1 on a null handle.
///
/// # Safety
/// `h` must be null or a live handle; `out` must point to at least `cap`
/// writable u64 slots whenever `cap` > 0.
#[no_mangle]
pub unsafe extern "C" fn polyprod_f_vector(
    h: *const PolytopeHandle,
    out: *mut u64,
    cap: usize,
) -> isize {
    guarded(-1, || {
        let fv = handle_ref(h)?.f_vector();
        if cap > 0 && out.is_null() {
            return Err("null output buffer".to_owned());
        }
        for (i, &count) in fv.iter().take(cap).enumerate() {
            *out.add(i) = count as u64;
        }
        Ok(fv.len() as isize)
    })
}

/// Order of the automorphism group. 0 on a null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_aut_order(h: *const PolytopeHandle) -> u64 {
    guarded(0, || Ok(automorphism_group(handle_ref(h)?).order()))
}

/// Order of the monodromy group. The group is closed over exchange-map
/// words, so the cost grows with the order itself; keep inputs modest.
/// 0 on a null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_mono_order(h: *const PolytopeHandle) -> u64 {
    guarded(0, || Ok(monodromy_group(handle_ref(h)?).order()))
}

/// Number of flag orbits under the automorphism group. 0 on a null
/// handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_orbit_count(h: *const PolytopeHandle) -> u64 {
    guarded(0, || Ok(flag_orbit_count(handle_ref(h)?)))
}

/// New handle for the dual polytope (the face poset upside down).
/// Null on a null input.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_dual(h: *const PolytopeHandle) -> *mut PolytopeHandle {
    guarded(std::ptr::null_mut(), || Ok(new_handle(handle_ref(h)?.dual())))
}

/// Product of two handles under one of the `POLYPROD_KIND_` constants.
/// Null on a bad kind, a null operand, or an inadmissible operand (the
/// topological product needs rank at least 2 on both sides).
///
/// # Safety
/// `a` and `b` must each be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_product(
    kind: c_int,
    a: *const PolytopeHandle,
    b: *const PolytopeHandle,
) -> *mut PolytopeHandle {
    guarded(std::ptr::null_mut(), || {
        let kind = kind_of(kind)?;
        let p = handle_ref(a)?;
        let q = handle_ref(b)?;
        let r = product(kind, p, q).map_err(|e| e.to_string())?;
        Ok(new_handle(r))
    })
}

/// Catalog-style name of the polytope (`"cube(3)"`, `"gon(5)"`, ...),
/// falling back to a canonical hash for unnamed posets. Free the string
/// with `polyprod_string_free`. Null on a null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_describe(h: *const PolytopeHandle) -> *mut c_char {
    guarded(std::ptr::null_mut(), || {
        export_string(describe(handle_ref(h)?))
    })
}

/// Prime factorization under `kind`, one `name ^ multiplicity` line per
/// prime, newline-terminated. Free with `polyprod_string_free`. Null on
/// error.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_factor_summary(
    h: *const PolytopeHandle,
    kind: c_int,
) -> *mut c_char {
    guarded(std::ptr::null_mut(), || {
        let kind = kind_of(kind)?;
        let f = factor(handle_ref(h)?, kind).map_err(|e| e.to_string())?;
        export_string(factor_lines(&f))
    })
}

/// Face poset as JSON: every face with its rank, every cover relation as
/// an `[upper, lower]` pair. Free with `polyprod_string_free`. Null on a
/// null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_export_json(h: *const PolytopeHandle) -> *mut c_char {
    guarded(std::ptr::null_mut(), || {
        export_string(handle_ref(h)?.poset().to_json_string())
    })
}

/// Face poset as a Graphviz digraph of the Hasse diagram. Free with
/// `polyprod_string_free`. Null on a null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn polyprod_export_dot(h: *const PolytopeHandle) -> *mut c_char {
    guarded(std::ptr::null_mut(), || {
        export_string(handle_ref(h)?.poset().to_dot())
    })
}

/// Frees a string returned by this library. Null is allowed.
///
/// # Safety
/// `s` must be null or a string returned by this library that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn polyprod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
