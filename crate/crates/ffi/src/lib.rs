//! C interface to `recon`.
//!
//! Objects are opaque handles created by `recon_*_new` style functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`ReconStatus`]; on failure `recon_last_error` describes the error on the
//! calling thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use recon::cli::{reconstruct, ComplexKind, NormalizationMode, PipelineConfig, Reconstruction, Source};
use recon::geom::PointCloud;
use recon::manifold::{sample, AnalyticManifold, ManifoldKind, SampleSpec};
use recon::ReconError;

/// Result codes. `Ok` is zero; the others mirror the library's error kinds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReconStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DegenerateSimplex = 3,
    NotInAffineHull = 4,
    NotFound = 5,
    InfeasibleSpec = 6,
    InsufficientNeighbors = 7,
    OrientationUndefined = 8,
    NoCandidates = 9,
    MissingWeight = 10,
    GenericityViolation = 11,
    DegenerateNormalization = 12,
    NumericalFailure = 13,
    UnsupportedFormat = 14,
    ParseError = 15,
    IoError = 16,
    Panic = 17,
}

impl From<&ReconError> for ReconStatus {
    fn from(e: &ReconError) -> Self {
        match e {
            ReconError::InvalidInput(_) => ReconStatus::InvalidInput,
            ReconError::DegenerateSimplex { .. } => ReconStatus::DegenerateSimplex,
            ReconError::NotInAffineHull { .. } => ReconStatus::NotInAffineHull,
            ReconError::NotFound(_) => ReconStatus::NotFound,
            ReconError::InfeasibleSpec(_) => ReconStatus::InfeasibleSpec,
            ReconError::InsufficientNeighbors { .. } => ReconStatus::InsufficientNeighbors,
            ReconError::OrientationUndefined { .. } => ReconStatus::OrientationUndefined,
            ReconError::NoCandidates => ReconStatus::NoCandidates,
            ReconError::MissingWeight(_) => ReconStatus::MissingWeight,
            ReconError::GenericityViolation { .. } => ReconStatus::GenericityViolation,
            ReconError::DegenerateNormalization { .. } => ReconStatus::DegenerateNormalization,
            ReconError::NumericalFailure(_) => ReconStatus::NumericalFailure,
            ReconError::UnsupportedFormat(_) => ReconStatus::UnsupportedFormat,
            ReconError::Parse { .. } => ReconStatus::ParseError,
            ReconError::Io(_) => ReconStatus::IoError,
        }
    }
}

/// Analytic manifolds available to [`recon_cloud_generate`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReconManifold {
    /// Circle of radius `a` in the plane.
    Circle = 0,
    /// Sphere of radius `a` in R^3.
    Sphere = 1,
    /// Torus with major radius `a` and minor radius `b` in R^3.
    Torus = 2,
}

/// Complexes the chain problem can be posed on.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReconComplex {
    Rips = 0,
    Cech = 1,
    DelaunayCech = 2,
}

/// Parameters of [`recon_reconstruct`]. Non-positive `rho` or `scale_r`
/// select the defaults `16 epsilon` and `epsilon`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct ReconParams {
    pub d: usize,
    pub epsilon: f64,
    pub rho: f64,
    pub scale_r: f64,
    pub complex: ReconComplex,
    pub seed: u64,
}

/// Opaque point cloud.
pub struct ReconCloud(PointCloud);

/// Opaque reconstruction outcome.
pub struct ReconResult(Box<Reconstruction>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), ReconError>>(f: F) -> ReconStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ReconStatus::Ok,
        Ok(Err(e)) => {
            let status = ReconStatus::from(&e);
            set_error(e.to_string());
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ReconStatus::Panic
        }
    }
}

fn null_error(what: &str) -> ReconStatus {
    set_error(format!("{what} is null"));
    ReconStatus::NullPointer
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn recon_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn recon_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `n_points * dim` row-major coordinates into a new cloud.
///
/// # Safety
/// `coords` must point to `n_points * dim` readable doubles and `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn recon_cloud_new(
    coords: *const f64,
    n_points: usize,
    dim: usize,
    out: *mut *mut ReconCloud,
) -> ReconStatus {
    if out.is_null() {
        return null_error("out");
    }
    if coords.is_null() && n_points * dim > 0 {
        return null_error("coords");
    }
    guard(|| {
        let data = if n_points * dim == 0 { Vec::new() } else { std::slice::from_raw_parts(coords, n_points * dim).to_vec() };
        let cloud = PointCloud::new(dim, data)?;
        *out = Box::into_raw(Box::new(ReconCloud(cloud)));
        Ok(())
    })
}

/// Samples about `n` points of an analytic manifold with normal noise of
/// size at most `delta`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn recon_cloud_generate(
    kind: ReconManifold,
    a: f64,
    b: f64,
    n: usize,
    delta: f64,
    seed: u64,
    out: *mut *mut ReconCloud,
) -> ReconStatus {
    if out.is_null() {
        return null_error("out");
    }
    guard(|| {
        let kind = match kind {
            ReconManifold::Circle => ManifoldKind::Circle { radius: a },
            ReconManifold::Sphere => ManifoldKind::Sphere { radius: a },
            ReconManifold::Torus => ManifoldKind::Torus { major: a, minor: b },
        };
        let m = AnalyticManifold::new(kind)?;
        let cloud = sample(&m, &SampleSpec::new(f64::MAX, delta, seed).with_count(n))?;
        *out = Box::into_raw(Box::new(ReconCloud(cloud)));
        Ok(())
    })
}

/// # Safety
/// `cloud` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn recon_cloud_free(cloud: *mut ReconCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// # Safety
/// `cloud` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_cloud_len(cloud: *const ReconCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `cloud` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_cloud_dim(cloud: *const ReconCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.0.dim())
}

/// Copies the coordinates of point `i` into `buf`, which holds `dim` doubles.
///
/// # Safety
/// `cloud` must be a live handle and `buf` must have room for `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn recon_cloud_point(cloud: *const ReconCloud, i: usize, buf: *mut f64) -> ReconStatus {
    let Some(c) = cloud.as_ref() else { return null_error("cloud") };
    if buf.is_null() {
        return null_error("buf");
    }
    guard(|| {
        if i >= c.0.len() {
            return Err(ReconError::NotFound(vec![i]));
        }
        let p = c.0.point(i);
        std::slice::from_raw_parts_mut(buf, p.len()).copy_from_slice(p);
        Ok(())
    })
}

/// Solves the chain problem on `cloud` with realistic normalization and
/// compares the solution with the Delloc complex.
///
/// # Safety
/// `cloud` and `params` must be live, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn recon_reconstruct(
    cloud: *const ReconCloud,
    params: *const ReconParams,
    out: *mut *mut ReconResult,
) -> ReconStatus {
    let Some(c) = cloud.as_ref() else { return null_error("cloud") };
    let Some(p) = params.as_ref() else { return null_error("params") };
    if out.is_null() {
        return null_error("out");
    }
    guard(|| {
        let mut cfg = PipelineConfig::new(Source::Cloud(c.0.clone()));
        cfg.d = Some(p.d);
        cfg.epsilon = Some(p.epsilon);
        cfg.rho = (p.rho > 0.0).then_some(p.rho);
        cfg.scale_r = (p.scale_r > 0.0).then_some(p.scale_r);
        cfg.complex = match p.complex {
            ReconComplex::Rips => ComplexKind::Rips,
            ReconComplex::Cech => ComplexKind::Cech,
            ReconComplex::DelaunayCech => ComplexKind::DelaunayCech,
        };
        cfg.normalization = Some(NormalizationMode::Realistic);
        cfg.seed = p.seed;
        let rec = reconstruct(&cfg)?;
        *out = Box::into_raw(Box::new(ReconResult(Box::new(rec))));
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn recon_result_free(result: *mut ReconResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// 1 if the solver reached an optimum with residuals within tolerance.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_result_ok(result: *const ReconResult) -> i32 {
    result.as_ref().map_or(0, |r| i32::from(r.0.report.ok))
}

/// 1 or 0 for the comparison with the Delloc complex, -1 if not evaluated.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_result_matches_delloc(result: *const ReconResult) -> i32 {
    result.as_ref().and_then(|r| r.0.report.result.matches_delloc).map_or(-1, i32::from)
}

/// Delaunay energy of the optimal chain.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_result_energy(result: *const ReconResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.report.result.energy)
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_result_euler_characteristic(result: *const ReconResult) -> i64 {
    result.as_ref().map_or(0, |r| r.0.report.euler_characteristic)
}

/// Dimension `d` of the chain.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_result_dim(result: *const ReconResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.report.config.d)
}

/// Number of simplices with a nonzero coefficient.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_result_support_size(result: *const ReconResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.report.support_size)
}

/// Writes the support: `vertices` receives `(d + 1) * size` sorted vertex
/// indices, `coefficients` `size` values. Either buffer may be null.
///
/// # Safety
/// Non-null buffers must have room for the counts above, where `size` is
/// [`recon_result_support_size`].
#[no_mangle]
pub unsafe extern "C" fn recon_result_support(
    result: *const ReconResult,
    vertices: *mut usize,
    coefficients: *mut f64,
) -> ReconStatus {
    let Some(r) = result.as_ref() else { return null_error("result") };
    guard(|| {
        let chain = &r.0.report.result.rounded_chain;
        let d = r.0.report.config.d;
        for (i, (s, c)) in chain.sorted_entries().into_iter().filter(|(_, c)| *c != 0.0).enumerate() {
            if !vertices.is_null() {
                std::slice::from_raw_parts_mut(vertices.add(i * (d + 1)), d + 1).copy_from_slice(s.vertices());
            }
            if !coefficients.is_null() {
                *coefficients.add(i) = c;
            }
        }
        Ok(())
    })
}

/// Full JSON report as a new string; release it with [`recon_string_free`].
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn recon_result_report_json(result: *const ReconResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => CString::new(recon::fmt::to_json(&r.0.report)).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn recon_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Borrowed view of a C string, for tests and callers in Rust.
///
/// # Safety
/// `s` must be a valid NUL-terminated string.
pub unsafe fn c_str<'a>(s: *const c_char) -> Option<&'a str> {
    (!s.is_null()).then(|| CStr::from_ptr(s).to_str().ok()).flatten()
}
