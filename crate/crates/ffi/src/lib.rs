//! C ABI over the `functree` library.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Every fallible call returns an [`FtStatus`];
//! on failure the message is available from [`ft_last_error_message`] on the
//! same thread. Strings returned by the library must be released with
//! [`ft_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use functree::apportion::apportionment_report;
use functree::certificate::certificate_magnitude_check;
use functree::decomposition::{
    decompose_directed_knn, decompose_k2n1, decompose_knxnx, verify_partition, Decomposition, HostKind,
};
use functree::export::{export, parse_tree, ExportFormat, ExportObject};
use functree::labeling::{find_beta, verify_beta, Labeling};
use functree::{Error, FunctionalTree, Permutation};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    MalformedInput = 3,
    NotAFunctionalTree = 4,
    InvalidPermutation = 5,
    PreconditionViolated = 6,
    ResourceLimit = 7,
    NotBetaLabeling = 8,
    NotFound = 9,
    VerificationFailed = 10,
    UnsupportedFormat = 11,
    BufferTooSmall = 12,
    Io = 13,
    Internal = 14,
}

/// A validated functional tree.
pub struct FtTree(FunctionalTree);

/// A verified oriented beta-labeling.
pub struct FtLabeling(Labeling);

/// A verified cyclic decomposition.
pub struct FtDecomposition(Decomposition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> FtStatus {
    match e {
        Error::NotAFunctionalTree(_) => FtStatus::NotAFunctionalTree,
        Error::InvalidPermutation(_) => FtStatus::InvalidPermutation,
        Error::PreconditionViolated(_) => FtStatus::PreconditionViolated,
        Error::ResourceLimit { .. } => FtStatus::ResourceLimit,
        Error::NotBetaLabeling(_) => FtStatus::NotBetaLabeling,
        Error::MalformedInput(_) | Error::Json(_) | Error::NotBijective(_) => FtStatus::MalformedInput,
        Error::NotFound => FtStatus::NotFound,
        Error::VerificationFailed(_) | Error::PartialFailure(_) => FtStatus::VerificationFailed,
        Error::UnsupportedFormat(_) => FtStatus::UnsupportedFormat,
        Error::Io(_) => FtStatus::Io,
        Error::ReductionDiverged(_) => FtStatus::Internal,
    }
}

struct Failure(FtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FtStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FtStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            FtStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_slice<'a>(p: *const usize, len: usize, what: &str) -> Result<&'a [usize], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s)
        .map_err(|_| Failure(FtStatus::Internal, "string contains a NUL byte".into()))?
        .into_raw();
    Ok(())
}

/// Copies the calling thread's most recent error message, or returns null if
/// there is none. Release the result with `ft_string_free`.
#[no_mangle]
pub extern "C" fn ft_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a tree from its parent map `g[0..n]`.
///
/// # Safety
/// `g` must point to `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_tree_from_parent_map(g: *const usize, n: usize, out: *mut *mut FtTree) -> FtStatus {
    guard(|| {
        let g = read_slice(g, n, "parent map")?.to_vec();
        write_out(out, FtTree(FunctionalTree::from_parent_map(n, g)?))
    })
}

/// Parses `{"n":..,"g":[..]}` or a bare parent map.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_tree_from_json(json: *const c_char, out: *mut *mut FtTree) -> FtStatus {
    guard(|| write_out(out, FtTree(parse_tree(read_str(json, "json")?)?)))
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live tree handle.
#[no_mangle]
pub unsafe extern "C" fn ft_tree_vertex_count(t: *const FtTree) -> usize {
    t.as_ref().map_or(0, |t| t.0.n())
}

/// # Safety
/// `t` must be null or a tree handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ft_tree_free(t: *mut FtTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Searches for an oriented beta-labeling of `t`.
///
/// # Safety
/// `t` must be a live tree handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_labeling_find(t: *const FtTree, out: *mut *mut FtLabeling) -> FtStatus {
    guard(|| {
        let t = borrow(t, "tree")?;
        write_out(out, FtLabeling(find_beta(&t.0)?))
    })
}

/// Verifies `sigma[0..n]` as an oriented beta-labeling of `t`.
///
/// # Safety
/// `t` must be a live tree handle, `sigma` must point to `n` readable values
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_labeling_verify(
    t: *const FtTree,
    sigma: *const usize,
    n: usize,
    out: *mut *mut FtLabeling,
) -> FtStatus {
    guard(|| {
        let t = borrow(t, "tree")?;
        let sigma = Permutation::new(read_slice(sigma, n, "sigma")?.to_vec())?;
        write_out(out, FtLabeling(verify_beta(&t.0, &sigma)?))
    })
}

/// Copies the permutation into `buf[0..len]`; `len` must be at least the
/// number of vertices.
///
/// # Safety
/// `lab` must be a live labeling handle and `buf` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn ft_labeling_sigma(lab: *const FtLabeling, buf: *mut usize, len: usize) -> FtStatus {
    guard(|| {
        let sigma = borrow(lab, "labeling")?.0.sigma.as_slice();
        if buf.is_null() {
            return Err(null("buffer"));
        }
        if len < sigma.len() {
            return Err(Failure(
                FtStatus::BufferTooSmall,
                format!("need room for {} values, got {len}", sigma.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, sigma.len()).copy_from_slice(sigma);
        Ok(())
    })
}

/// # Safety
/// `lab` must be null or a labeling handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ft_labeling_free(lab: *mut FtLabeling) {
    if !lab.is_null() {
        drop(Box::from_raw(lab));
    }
}

/// Decomposes the host named by `target` ("knn", "k2n1" or "knxnx").
/// `x` is ignored for "knn".
///
/// # Safety
/// `t` and `lab` must be live handles, `target` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_decompose(
    t: *const FtTree,
    lab: *const FtLabeling,
    target: *const c_char,
    x: usize,
    out: *mut *mut FtDecomposition,
) -> FtStatus {
    guard(|| {
        let t = &borrow(t, "tree")?.0;
        let lab = &borrow(lab, "labeling")?.0;
        let d = match HostKind::parse(read_str(target, "target")?)? {
            HostKind::DirectedKnn => decompose_directed_knn(t, lab)?,
            HostKind::K2n1 => decompose_k2n1(t, lab, x)?,
            HostKind::Knxnx => decompose_knxnx(t, lab, x)?,
        };
        write_out(out, FtDecomposition(d))
    })
}

/// Number of copies, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live decomposition handle.
#[no_mangle]
pub unsafe extern "C" fn ft_decomposition_copy_count(d: *const FtDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.0.copies.len())
}

/// Re-runs the partition verifier and stores the verdict in `pass`.
///
/// # Safety
/// `d` must be a live decomposition handle and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_decomposition_verify(d: *const FtDecomposition, pass: *mut bool) -> FtStatus {
    guard(|| {
        let report = verify_partition(&borrow(d, "decomposition")?.0);
        if pass.is_null() {
            return Err(null("pass"));
        }
        *pass = report.pass;
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a decomposition handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ft_decomposition_free(d: *mut FtDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

unsafe fn export_to(object: ExportObject<'_>, format: *const c_char, out: *mut *mut c_char) -> Result<(), Failure> {
    let format = ExportFormat::parse(read_str(format, "format")?)?;
    write_string(out, export(format, object)?)
}

/// Renders a tree as "json" or "dot".
///
/// # Safety
/// `t` must be a live handle, `format` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_tree_export(t: *const FtTree, format: *const c_char, out: *mut *mut c_char) -> FtStatus {
    guard(|| export_to(ExportObject::Tree(&borrow(t, "tree")?.0), format, out))
}

/// Renders a labeling as "json" or "dot".
///
/// # Safety
/// Same as `ft_tree_export`.
#[no_mangle]
pub unsafe extern "C" fn ft_labeling_export(
    lab: *const FtLabeling,
    format: *const c_char,
    out: *mut *mut c_char,
) -> FtStatus {
    guard(|| export_to(ExportObject::Labeling(&borrow(lab, "labeling")?.0), format, out))
}

/// Renders a decomposition as "json" or "dot" (one frame per copy).
///
/// # Safety
/// Same as `ft_tree_export`.
#[no_mangle]
pub unsafe extern "C" fn ft_decomposition_export(
    d: *const FtDecomposition,
    format: *const c_char,
    out: *mut *mut c_char,
) -> FtStatus {
    guard(|| export_to(ExportObject::Decomposition(&borrow(d, "decomposition")?.0), format, out))
}

/// Checks that the certificate has the same magnitude at every labeling
/// permutation. `expected` receives that magnitude in decimal.
///
/// # Safety
/// `t` must be a live handle; `expected` and `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_certificate_magnitude(
    t: *const FtTree,
    expected: *mut *mut c_char,
    pass: *mut bool,
) -> FtStatus {
    guard(|| {
        let r = certificate_magnitude_check(&borrow(t, "tree")?.0)?;
        if pass.is_null() {
            return Err(null("pass"));
        }
        *pass = r.pass;
        write_string(expected, r.expected)
    })
}

/// Checks the apportionment of `I ⊗ A` at tolerance `tol`. `kappa_error`
/// receives the largest deviation of an entry modulus from `1/n`.
///
/// # Safety
/// `t` and `lab` must be live handles; `kappa_error` and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_apportion_check(
    t: *const FtTree,
    lab: *const FtLabeling,
    tol: f64,
    kappa_error: *mut f64,
    pass: *mut bool,
) -> FtStatus {
    guard(|| {
        let r = apportionment_report(&borrow(t, "tree")?.0, &borrow(lab, "labeling")?.0, tol)?;
        if kappa_error.is_null() || pass.is_null() {
            return Err(null("output pointer"));
        }
        *kappa_error = r.kappa_max_error;
        *pass = r.pass;
        Ok(())
    })
}
