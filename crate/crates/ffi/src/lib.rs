//! C interface to rigidity-lab.
//!
//! Every fallible call returns an [`RlStatus`]; on failure the message is
//! available from [`rl_last_error`] on the same thread. Strings handed out by
//! the library are owned by the caller and released with [`rl_string_free`].
//! Polyhedra are opaque [`RlPolyhedron`] handles released with
//! [`rl_polyhedron_free`].

use rigidity_lab::document::{to_obj, PolyhedronDocument};
use rigidity_lab::generators::CoverRecipe;
use rigidity_lab::pipeline::{self, AnalysisOptions, GenParams, SweepParam};
use rigidity_lab::stiffness::{FDScheme, FdKind};
use rigidity_lab::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON, OBJ or parameter string.
    Parse = 3,
    /// The polyhedron or triangulation fails validation.
    InvalidInput = 4,
    /// Parameters outside their domain.
    BadParams = 5,
    /// A numerical step could not complete (degenerate tetrahedra and so on).
    Numerical = 6,
    Io = 7,
    /// A panic was caught at the boundary.
    Internal = 8,
}

/// Opaque polyhedron handle.
pub struct RlPolyhedron {
    doc: PolyhedronDocument,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlScheme {
    Central = 0,
    Forward = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RlAnalysisOptions {
    pub scheme: RlScheme,
    /// Finite-difference step; zero or negative picks the scheme default.
    pub epsilon: f64,
    pub tol_eig: f64,
    pub tol_sv: f64,
    pub budget: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RlGenParams {
    pub theta: f64,
    pub r: f64,
    pub h: f64,
    pub depth: f64,
    pub shift: f64,
    /// Use the alternate diagonal when closing the T-polyhedron cover.
    pub backward_cover: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RlStatus {
    match e {
        Error::Parse(_) | Error::BadEdgeLabel(_) => RlStatus::Parse,
        Error::InvalidSurface(_)
        | Error::InvalidTriangulation(_)
        | Error::SelfIntersecting(..)
        | Error::TooManyVertices(_)
        | Error::NotConvex => RlStatus::InvalidInput,
        Error::BadParams(_)
        | Error::BadScheme(_)
        | Error::BadRange(_)
        | Error::UnknownGenerator(_)
        | Error::ImaginaryHeight(_)
        | Error::DegenerateDepth(_)
        | Error::NonPositiveLength(_) => RlStatus::BadParams,
        Error::Io(_) => RlStatus::Io,
        _ => RlStatus::Numerical,
    }
}

struct Fail(RlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RlStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            RlStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(RlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(RlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const RlPolyhedron) -> Result<&'a RlPolyhedron, Fail> {
    p.as_ref().ok_or_else(|| Fail(RlStatus::NullPointer, "polyhedron handle is null".into()))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(RlStatus::NullPointer, "output pointer is null".into()))
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s).expect("library output has no nul bytes").into_raw()
}

fn give_handle(doc: PolyhedronDocument) -> *mut RlPolyhedron {
    Box::into_raw(Box::new(RlPolyhedron { doc }))
}

fn analysis_options(o: Option<&RlAnalysisOptions>) -> Result<AnalysisOptions, Fail> {
    let Some(o) = o else { return Ok(AnalysisOptions::default()) };
    let scheme = match (o.scheme, o.epsilon > 0.0) {
        (RlScheme::Central, false) => FDScheme::central(),
        (RlScheme::Forward, false) => FDScheme::forward_replication(),
        (RlScheme::Central, true) => FDScheme::new(FdKind::Central, o.epsilon)?,
        (RlScheme::Forward, true) => FDScheme::new(FdKind::Forward, o.epsilon)?,
    };
    Ok(AnalysisOptions { scheme, tol_eig: o.tol_eig, tol_sv: o.tol_sv, budget: o.budget })
}

fn gen_params(p: Option<&RlGenParams>) -> GenParams {
    match p {
        None => GenParams::default(),
        Some(p) => GenParams {
            theta: p.theta,
            r: p.r,
            h: p.h,
            depth: p.depth,
            shift: p.shift,
            cover: if p.backward_cover { CoverRecipe::Backward } else { CoverRecipe::Forward },
        },
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn rl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn rl_analysis_options_default() -> RlAnalysisOptions {
    let d = AnalysisOptions::default();
    RlAnalysisOptions {
        scheme: RlScheme::Central,
        epsilon: 0.0,
        tol_eig: d.tol_eig,
        tol_sv: d.tol_sv,
        budget: d.budget,
    }
}

#[no_mangle]
pub extern "C" fn rl_gen_params_default() -> RlGenParams {
    let d = GenParams::default();
    RlGenParams { theta: d.theta, r: d.r, h: d.h, depth: d.depth, shift: d.shift, backward_cover: false }
}

/// Parses a polyhedron document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_polyhedron_from_json(json: *const c_char, out: *mut *mut RlPolyhedron) -> RlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let doc = PolyhedronDocument::from_json(read_str(json, "json")?)?;
        *out = give_handle(doc);
        Ok(())
    })
}

/// Builds a named polyhedron. `params` may be null for defaults.
///
/// # Safety
/// `name` must be a nul-terminated string, `params` null or valid, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rl_polyhedron_generate(
    name: *const c_char,
    params: *const RlGenParams,
    out: *mut *mut RlPolyhedron,
) -> RlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let doc = pipeline::generate(read_str(name, "name")?, &gen_params(params.as_ref()))?;
        *out = give_handle(doc);
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rl_polyhedron_free(p: *mut RlPolyhedron) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_polyhedron_vertex_count(p: *const RlPolyhedron) -> usize {
    p.as_ref().map_or(0, |h| h.doc.vertices.len())
}

/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rl_polyhedron_face_count(p: *const RlPolyhedron) -> usize {
    p.as_ref().map_or(0, |h| h.doc.faces.len())
}

/// Copies vertex coordinates as `x0 y0 z0 x1 ...` into `buf`, which must hold
/// `3 * rl_polyhedron_vertex_count(p)` doubles.
///
/// # Safety
/// `p` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rl_polyhedron_vertices(p: *const RlPolyhedron, buf: *mut f64, len: usize) -> RlStatus {
    guard(|| {
        let h = handle(p)?;
        if buf.is_null() {
            return Err(Fail(RlStatus::NullPointer, "buffer is null".into()));
        }
        let need = 3 * h.doc.vertices.len();
        if len < need {
            return Err(Fail(RlStatus::BadParams, format!("buffer holds {len} doubles, need {need}")));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (c, v) in dst.chunks_exact_mut(3).zip(&h.doc.vertices) {
            c.copy_from_slice(v);
        }
        Ok(())
    })
}

/// Serializes the document.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_polyhedron_to_json(p: *const RlPolyhedron, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let h = handle(p)?;
        *out_ptr(out)? = give_string(h.doc.to_json());
        Ok(())
    })
}

/// Writes the surface as Wavefront OBJ text.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_polyhedron_to_obj(p: *const RlPolyhedron, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let h = handle(p)?;
        h.doc.surface()?.ensure_valid()?;
        *out_ptr(out)? = give_string(to_obj(&h.doc.vertices, &h.doc.faces));
        Ok(())
    })
}

/// Full analysis, returned as an analysis report in JSON. `opts` may be null.
///
/// # Safety
/// `p` must be a live handle, `opts` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_analyze(
    p: *const RlPolyhedron,
    opts: *const RlAnalysisOptions,
    out: *mut *mut c_char,
) -> RlStatus {
    guard(|| {
        let h = handle(p)?;
        let out = out_ptr(out)?;
        let opts = analysis_options(opts.as_ref())?;
        h.doc.surface()?.ensure_valid()?;
        *out = give_string(pipeline::analyze_document(&h.doc, &opts)?.to_json());
        Ok(())
    })
}

/// Decomposition search only, as JSON.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_decompose(p: *const RlPolyhedron, budget: usize, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let h = handle(p)?;
        let out = out_ptr(out)?;
        let d = pipeline::decompose_document(&h.doc, budget)?;
        *out = give_string(serde_json::to_string_pretty(&d).expect("decomposition serializes"));
        Ok(())
    })
}

/// Sweeps `param` (`theta`, `shift` or `depth`) of a generator over
/// `from..=to` and returns the table as JSON.
///
/// # Safety
/// String arguments must be nul-terminated, `params` and `opts` null or
/// valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_sweep(
    generator: *const c_char,
    param: *const c_char,
    from: f64,
    to: f64,
    step: f64,
    params: *const RlGenParams,
    opts: *const RlAnalysisOptions,
    out: *mut *mut c_char,
) -> RlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let g = read_str(generator, "generator")?;
        let param: SweepParam = read_str(param, "param")?.parse()?;
        let xs = pipeline::sample_range(from, to, step)?;
        let t = pipeline::sweep(g, param, &xs, &gen_params(params.as_ref()), &analysis_options(opts.as_ref())?)?;
        *out = give_string(t.to_json());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
