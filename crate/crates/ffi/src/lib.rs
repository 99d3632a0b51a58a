//! C ABI for the curveflow solvers.
//!
//! Curves and evolvers are opaque heap handles created by `cf_*_new`-style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`CfStatus`]; on failure a description is available from
//! [`cf_last_error_message`] on the same thread. Panics never cross the
//! boundary and are reported as [`CfStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use curveflow::{
    geometry, manifold_distance, sample_curve, CurveKind, FlowError, ForceSpec, GridCurve, Scheme,
    SchemeKind, TangentialParams, Vec2, VertexNormal,
};

pub const CF_CURVE_ELLIPSE: u32 = 0;
pub const CF_CURVE_FOUR_LEAF_ROSE: u32 = 1;
pub const CF_CURVE_FLOWER: u32 = 2;
pub const CF_CURVE_RECTANGLE: u32 = 3;

pub const CF_SCHEME_FDM: u32 = 0;
pub const CF_SCHEME_FEM: u32 = 1;
pub const CF_SCHEME_FEM_TM: u32 = 2;

/// `f(L) = 2 pi / L`; the force parameter is ignored.
pub const CF_FORCE_AREA_PRESERVING: u32 = 0;
/// `f(L) = 2 pi ind / L`; the force parameter is `ind`.
pub const CF_FORCE_AREA_PRESERVING_INDEX: u32 = 1;
/// `f(L) = (2 pi - beta) / L`; the force parameter is `beta`.
pub const CF_FORCE_PRESCRIBED_RATE: u32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidCurve = 3,
    BufferTooSmall = 4,
    Cusp = 5,
    SingularSystem = 6,
    MeshDegenerate = 7,
    NumericalDegeneracy = 8,
    Panic = 9,
}

/// Opaque closed polygon.
pub struct CfCurve(GridCurve);

/// Opaque stepping state: scheme, forcing and time step.
pub struct CfEvolver {
    scheme: Scheme,
    force: ForceSpec,
    tau: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(CfStatus, String);

impl From<FlowError> for Fail {
    fn from(e: FlowError) -> Self {
        let status = match e.root() {
            FlowError::Cusp { .. } => CfStatus::Cusp,
            FlowError::SingularSystem { .. } => CfStatus::SingularSystem,
            FlowError::MeshDegenerate { .. } | FlowError::NonpositivePerimeter(_) => {
                CfStatus::MeshDegenerate
            }
            FlowError::NumericalDegeneracy { .. } => CfStatus::NumericalDegeneracy,
            FlowError::InvalidCurve(_) | FlowError::DegenerateInput(_) => CfStatus::InvalidCurve,
            _ => CfStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CfStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            CfStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn curve_kind(kind: u32) -> Result<CurveKind, Fail> {
    match kind {
        CF_CURVE_ELLIPSE => Ok(CurveKind::Ellipse),
        CF_CURVE_FOUR_LEAF_ROSE => Ok(CurveKind::FourLeafRose),
        CF_CURVE_FLOWER => Ok(CurveKind::Flower),
        CF_CURVE_RECTANGLE => Ok(CurveKind::Rectangle4x1),
        k => Err(Fail(
            CfStatus::InvalidArgument,
            format!("unknown curve kind {k}"),
        )),
    }
}

fn force_spec(kind: u32, param: f64) -> Result<ForceSpec, Fail> {
    match kind {
        CF_FORCE_AREA_PRESERVING => Ok(ForceSpec::AreaPreservingSimple),
        CF_FORCE_AREA_PRESERVING_INDEX => {
            if param.fract() != 0.0 || param.abs() > i32::MAX as f64 {
                return Err(Fail(
                    CfStatus::InvalidArgument,
                    format!("index {param} is not an integer"),
                ));
            }
            Ok(ForceSpec::nonsimple(param as i32)?)
        }
        CF_FORCE_PRESCRIBED_RATE => Ok(ForceSpec::prescribed_rate(param)?),
        k => Err(Fail(
            CfStatus::InvalidArgument,
            format!("unknown force kind {k}"),
        )),
    }
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Samples one of the built-in initial curves at `n` uniform parameter values.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_sample(kind: u32, n: usize, out: *mut *mut CfCurve) -> CfStatus {
    guard(|| {
        let c = sample_curve(curve_kind(kind)?, n)?;
        write(out, Box::into_raw(Box::new(CfCurve(c))))
    })
}

/// Builds a curve from `n` interleaved `x, y` pairs.
///
/// # Safety
/// `xy` must point to `2 * n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_from_xy(
    xy: *const f64,
    n: usize,
    out: *mut *mut CfCurve,
) -> CfStatus {
    guard(|| {
        if xy.is_null() {
            return Err(null("xy"));
        }
        let len = n
            .checked_mul(2)
            .ok_or_else(|| Fail(CfStatus::InvalidArgument, "n overflows".into()))?;
        let flat = std::slice::from_raw_parts(xy, len);
        let pts = flat
            .chunks_exact(2)
            .map(|p| Vec2::new(p[0], p[1]))
            .collect();
        let c = GridCurve::new(pts)?;
        write(out, Box::into_raw(Box::new(CfCurve(c))))
    })
}

/// Releases a curve. Null is ignored.
///
/// # Safety
/// `curve` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_free(curve: *mut CfCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of vertices, or 0 for null.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_len(curve: *const CfCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.n_segments())
}

/// Copies the vertices as interleaved `x, y` pairs into `xy`, which holds
/// `capacity` doubles.
///
/// # Safety
/// `curve` must be a live handle and `xy` writable for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_vertices(
    curve: *const CfCurve,
    xy: *mut f64,
    capacity: usize,
) -> CfStatus {
    guard(|| {
        let c = borrow(curve, "curve")?;
        if xy.is_null() {
            return Err(null("xy"));
        }
        let need = 2 * c.0.n_segments();
        if capacity < need {
            return Err(Fail(
                CfStatus::BufferTooSmall,
                format!("need {need} doubles, got {capacity}"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(xy, need);
        for (d, v) in dst.chunks_exact_mut(2).zip(c.0.vertices()) {
            d[0] = v.x;
            d[1] = v.y;
        }
        Ok(())
    })
}

unsafe fn measure(curve: *const CfCurve, out: *mut f64, f: fn(&GridCurve) -> f64) -> CfStatus {
    guard(|| {
        let c = borrow(curve, "curve")?;
        write(out, f(&c.0))
    })
}

/// # Safety
/// `curve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_perimeter(curve: *const CfCurve, out: *mut f64) -> CfStatus {
    measure(curve, out, geometry::perimeter)
}

/// Signed enclosed area, positive for counterclockwise curves.
///
/// # Safety
/// `curve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_area(curve: *const CfCurve, out: *mut f64) -> CfStatus {
    measure(curve, out, geometry::signed_area)
}

/// Longest over shortest edge.
///
/// # Safety
/// `curve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_mesh_ratio(curve: *const CfCurve, out: *mut f64) -> CfStatus {
    measure(curve, out, geometry::mesh_ratio)
}

/// Area between two curves weighted by the difference of winding numbers.
///
/// # Safety
/// Both curves must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cf_manifold_distance(
    a: *const CfCurve,
    b: *const CfCurve,
    out: *mut f64,
) -> CfStatus {
    guard(|| {
        let (a, b) = (borrow(a, "a")?, borrow(b, "b")?);
        write(out, manifold_distance(&a.0, &b.0)?)
    })
}

/// Creates an evolver. `alpha` is read only for `CF_SCHEME_FEM_TM`, where a
/// value of 0 or below selects 1. `edge_normals` nonzero switches FEM-TM to
/// incoming-edge vertex normals.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_evolver_new(
    scheme: u32,
    alpha: f64,
    edge_normals: i32,
    force: u32,
    force_param: f64,
    tau: f64,
    out: *mut *mut CfEvolver,
) -> CfStatus {
    guard(|| {
        let kind = match scheme {
            CF_SCHEME_FDM => SchemeKind::Fdm,
            CF_SCHEME_FEM => SchemeKind::Fem,
            CF_SCHEME_FEM_TM => SchemeKind::FemTm,
            k => {
                return Err(Fail(
                    CfStatus::InvalidArgument,
                    format!("unknown scheme {k}"),
                ))
            }
        };
        let scheme = if kind == SchemeKind::FemTm {
            let alpha = if alpha > 0.0 { alpha } else { 1.0 };
            let normal = if edge_normals != 0 {
                VertexNormal::IncomingEdge
            } else {
                VertexNormal::Bisector
            };
            Scheme::FemTm(TangentialParams::new(alpha)?.with_normal(normal))
        } else {
            Scheme::new(kind, None)?
        };
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Fail(
                CfStatus::InvalidArgument,
                format!("time step {tau} must be positive"),
            ));
        }
        let force = force_spec(force, force_param)?;
        write(
            out,
            Box::into_raw(Box::new(CfEvolver { scheme, force, tau })),
        )
    })
}

/// Releases an evolver. Null is ignored.
///
/// # Safety
/// `evolver` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_evolver_free(evolver: *mut CfEvolver) {
    if !evolver.is_null() {
        drop(Box::from_raw(evolver));
    }
}

/// Advances `curve` in place by `steps` time steps. On failure the curve
/// holds the last successfully computed level.
///
/// # Safety
/// Both handles must be live and distinct from any concurrently used handle.
#[no_mangle]
pub unsafe extern "C" fn cf_evolver_step(
    evolver: *const CfEvolver,
    curve: *mut CfCurve,
    steps: usize,
) -> CfStatus {
    guard(|| {
        let e = borrow(evolver, "evolver")?;
        let c = curve.as_mut().ok_or_else(|| null("curve"))?;
        for k in 0..steps {
            let next = e.scheme.step(&c.0, e.tau, &e.force).map_err(|err| {
                Fail::from(FlowError::AtLevel {
                    level: k + 1,
                    source: Box::new(err),
                })
            })?;
            c.0 = next.curve_next;
        }
        Ok(())
    })
}
