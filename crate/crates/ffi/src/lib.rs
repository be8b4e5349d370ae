//! C interface to the equifocal toolkit.
//!
//! Every function returns an [`EqfStatus`]; on failure a message is kept
//! per thread and read back with [`eqf_last_error`]. Strings handed out by
//! the library are released with [`eqf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use equifocal::focal::{self, JRange};
use equifocal::hermann::{self, HermannCatalog};
use equifocal::reflgroup;
use equifocal::rootsys::{self, RootSystem, RootType};
use equifocal::symcat::{self, Catalog};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotFound = 3,
    Unsupported = 4,
    BufferTooSmall = 5,
    NotProper = 6,
    Panic = 99,
}

/// Opaque root system.
pub struct EqfRootSystem(RootSystem);

/// Opaque symmetric-space catalog.
pub struct EqfCatalog(Catalog);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: EqfStatus, msg: impl Into<String>) -> EqfStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> EqfStatus) -> EqfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(EqfStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, EqfStatus> {
    if p.is_null() {
        return Err(fail(EqfStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(EqfStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn out_string(s: String, out: *mut *mut c_char) -> EqfStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            EqfStatus::Ok
        }
        Err(_) => fail(EqfStatus::InvalidArgument, "string contains a NUL byte"),
    }
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(EqfStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eqf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn eqf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Root system of type `kind` ("A", "B", "C", "D", "BC", "E6", "E7", "E8",
/// "F4", "G2"); `rank` is ignored for exceptional types.
///
/// # Safety
/// `kind` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqf_root_system_build(kind: *const c_char, rank: usize, out: *mut *mut EqfRootSystem) -> EqfStatus {
    guard(|| {
        nonnull!(out);
        let kind = match str_arg(kind, "kind") {
            Ok(k) => k,
            Err(s) => return s,
        };
        let Ok(kind) = kind.parse::<RootType>() else {
            return fail(EqfStatus::InvalidArgument, format!("unknown root system type {kind:?}"));
        };
        let rank = kind.fixed_rank().unwrap_or(rank);
        match rootsys::build_root_system(kind, rank) {
            Ok(rs) => {
                *out = Box::into_raw(Box::new(EqfRootSystem(rs)));
                EqfStatus::Ok
            }
            Err(e) => fail(EqfStatus::Unsupported, e.to_string()),
        }
    })
}

/// # Safety
/// `json` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqf_root_system_from_json(json: *const c_char, out: *mut *mut EqfRootSystem) -> EqfStatus {
    guard(|| {
        nonnull!(out);
        let json = match str_arg(json, "json") {
            Ok(j) => j,
            Err(s) => return s,
        };
        match RootSystem::from_json(json) {
            Ok(rs) => {
                *out = Box::into_raw(Box::new(EqfRootSystem(rs)));
                EqfStatus::Ok
            }
            Err(e) => fail(EqfStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `rs` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn eqf_root_system_free(rs: *mut EqfRootSystem) {
    if !rs.is_null() {
        drop(Box::from_raw(rs));
    }
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_root_system_counts(
    rs: *const EqfRootSystem,
    n_roots: *mut usize,
    n_positive: *mut usize,
    rank: *mut usize,
) -> EqfStatus {
    guard(|| {
        nonnull!(rs, n_roots, n_positive, rank);
        let rs = &(*rs).0;
        *n_roots = rs.len();
        *n_positive = rs.n_positive();
        *rank = rs.rank();
        EqfStatus::Ok
    })
}

/// Root-system conditions (i) closure under reflections, (ii) integrality,
/// (iii) reducedness.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_root_system_conditions(
    rs: *const EqfRootSystem,
    cond_i: *mut bool,
    cond_ii: *mut bool,
    cond_iii: *mut bool,
) -> EqfStatus {
    guard(|| {
        nonnull!(rs, cond_i, cond_ii, cond_iii);
        let c = rootsys::check_root_system_conditions(&(*rs).0);
        *cond_i = c.cond_i;
        *cond_ii = c.cond_ii;
        *cond_iii = c.cond_iii;
        EqfStatus::Ok
    })
}

/// # Safety
/// `rs` and `out` must be valid; free the result with [`eqf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn eqf_root_system_to_json(rs: *const EqfRootSystem, out: *mut *mut c_char) -> EqfStatus {
    guard(|| {
        nonnull!(rs, out);
        match (*rs).0.to_json() {
            Ok(s) => out_string(s, out),
            Err(e) => fail(EqfStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Order of the Weyl group by reflection closure, up to `max_order` elements.
///
/// # Safety
/// `rs` and `order` must be valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_root_system_weyl_order(rs: *const EqfRootSystem, max_order: usize, order: *mut u64) -> EqfStatus {
    guard(|| {
        nonnull!(rs, order);
        match reflgroup::generate_finite(&reflgroup::root_reflections(&(*rs).0), max_order) {
            Ok(g) if g.is_complete() => {
                *order = g.order() as u64;
                EqfStatus::Ok
            }
            Ok(g) => fail(EqfStatus::BufferTooSmall, format!("closure exceeds {} elements", g.order())),
            Err(e) => fail(EqfStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Weyl group order from the product formula.
///
/// # Safety
/// `kind` must be a NUL-terminated string, `order` valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_weyl_order(kind: *const c_char, rank: usize, order: *mut u64) -> EqfStatus {
    guard(|| {
        nonnull!(order);
        let kind = match str_arg(kind, "kind") {
            Ok(k) => k,
            Err(s) => return s,
        };
        let Ok(kind) = kind.parse::<RootType>() else {
            return fail(EqfStatus::InvalidArgument, format!("unknown root system type {kind:?}"));
        };
        let rank = kind.fixed_rank().unwrap_or(rank);
        match reflgroup::weyl_order(kind, rank).and_then(|o| u64::try_from(o).ok()) {
            Some(o) => {
                *order = o;
                EqfStatus::Ok
            }
            None => fail(EqfStatus::Unsupported, format!("no Weyl order for {kind}{rank}")),
        }
    })
}

/// Complex focal radii for `A_v = lambda` on a root space with
/// `beta(v) = beta`, for `j` in `j_min..=j_max`. Writes at most `capacity`
/// values and the total count to `written`.
///
/// # Safety
/// `re` and `im` must hold `capacity` doubles; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_focal_radii(
    lambda: f64,
    beta: f64,
    j_min: i64,
    j_max: i64,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> EqfStatus {
    guard(|| {
        nonnull!(written);
        if !(lambda.is_finite() && beta.is_finite()) || beta < 0.0 {
            return fail(EqfStatus::InvalidArgument, "lambda must be finite and beta finite and non-negative");
        }
        let radii = focal::complex_focal_radii(lambda, beta, JRange::new(j_min, j_max));
        *written = radii.len();
        if radii.len() > capacity {
            return fail(EqfStatus::BufferTooSmall, format!("{} radii, capacity {capacity}", radii.len()));
        }
        if !radii.is_empty() {
            nonnull!(re, im);
        }
        for (k, z) in radii.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        EqfStatus::Ok
    })
}

/// Reciprocal focal radii for one `(lambda, mu)` pair, same layout as
/// [`eqf_focal_radii`]. Fails with `NotProper` when `|lambda| = sqrt(-mu) != 0`.
///
/// # Safety
/// As for [`eqf_focal_radii`].
#[no_mangle]
pub unsafe extern "C" fn eqf_lifted_values(
    lambda: f64,
    mu: f64,
    j_min: i64,
    j_max: i64,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> EqfStatus {
    guard(|| {
        nonnull!(written);
        if mu > 0.0 {
            return fail(EqfStatus::InvalidArgument, "mu must be non-positive");
        }
        let vals = match focal::lifted_values(lambda, mu, JRange::new(j_min, j_max)) {
            Ok(v) => v,
            Err(e) => return fail(EqfStatus::NotProper, e.to_string()),
        };
        *written = vals.len();
        if vals.len() > capacity {
            return fail(EqfStatus::BufferTooSmall, format!("{} values, capacity {capacity}", vals.len()));
        }
        if !vals.is_empty() {
            nonnull!(re, im);
        }
        for (k, z) in vals.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        EqfStatus::Ok
    })
}

/// The bundled symmetric-space catalog.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_catalog_builtin(out: *mut *mut EqfCatalog) -> EqfStatus {
    guard(|| {
        nonnull!(out);
        *out = Box::into_raw(Box::new(EqfCatalog(Catalog::builtin())));
        EqfStatus::Ok
    })
}

/// # Safety
/// `path` must be a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_catalog_load(path: *const c_char, out: *mut *mut EqfCatalog) -> EqfStatus {
    guard(|| {
        nonnull!(out);
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match symcat::catalog_load(std::path::Path::new(path)) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(EqfCatalog(c)));
                EqfStatus::Ok
            }
            Err(e) => fail(EqfStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `cat` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn eqf_catalog_free(cat: *mut EqfCatalog) {
    if !cat.is_null() {
        drop(Box::from_raw(cat));
    }
}

/// # Safety
/// `cat` and `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_catalog_len(cat: *const EqfCatalog, len: *mut usize) -> EqfStatus {
    guard(|| {
        nonnull!(cat, len);
        *len = (*cat).0.len();
        EqfStatus::Ok
    })
}

/// `(#Delta+, #Delta+ of multiplicity 1, m)` computed from the restricted
/// roots of the space `id`, e.g. "AIII[p=2,q=5]".
///
/// # Safety
/// `cat`, `id` and the outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_catalog_m_invariant(
    cat: *const EqfCatalog,
    id: *const c_char,
    n_pos: *mut i64,
    n_mult1: *mut i64,
    m: *mut i64,
) -> EqfStatus {
    guard(|| {
        nonnull!(cat, n_pos, n_mult1, m);
        let id = match str_arg(id, "id") {
            Ok(i) => i,
            Err(s) => return s,
        };
        let Some(space) = (*cat).0.get(id) else {
            return fail(EqfStatus::NotFound, format!("unknown space {id:?}"));
        };
        let inv = symcat::m_invariant(space);
        *n_pos = inv.n_pos;
        *n_mult1 = inv.n_mult1;
        *m = inv.m;
        EqfStatus::Ok
    })
}

/// Maximal number of distinct principal curvatures of the bundled Hermann
/// action `id` (e.g. "T2-01[n=3]"), and the catalog's expected value.
///
/// # Safety
/// `id` and the outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn eqf_hermann_max_spec(id: *const c_char, computed: *mut i64, expected: *mut i64) -> EqfStatus {
    guard(|| {
        nonnull!(computed, expected);
        let id = match str_arg(id, "id") {
            Ok(i) => i,
            Err(s) => return s,
        };
        let cat = HermannCatalog::builtin();
        let Some(action) = cat.get(id) else {
            return fail(EqfStatus::NotFound, format!("unknown Hermann action {id:?}"));
        };
        *computed = hermann::max_distinct_spec(action);
        *expected = action.expected_max_spec.unwrap_or(-1);
        EqfStatus::Ok
    })
}
