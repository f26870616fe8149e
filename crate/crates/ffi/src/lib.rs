//! C interface to `sisi-core`.
//!
//! Objects are handed out as opaque handles and released with the matching
//! `*_free` function. Every fallible call returns a [`SisiStatus`]; after a
//! failure [`sisi_last_error_message`] describes it. Arrays of four doubles
//! hold a state in the order `x, u, y, v`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sisi_core::{
    apply, classify_fixed_point, enumerate_fixed_points, iterate_trajectory, solve_force_equation, validate_params,
    Error, FixedPointLabel, FixedPointSet, Params, RootOutcome, SimplexPoint, StabilityKind, Trajectory,
    TrajectoryStatus,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SisiStatus {
    Ok = 0,
    NullPointer,
    InvalidParameter,
    NotInSimplex,
    LeftSimplex,
    DegenerateParameters,
    InconsistentRoot,
    ConvergenceFailure,
    PreconditionViolated,
    NotAFixedPoint,
    InvalidScenarioConfig,
    IndexOutOfRange,
    Panic,
}

/// Model parameters `b, alpha, beta1, beta2, k1, k2`.
pub struct SisiParams(Params);

/// A stored orbit.
pub struct SisiTrajectory(Trajectory);

/// Fixed points and fixed faces of one parameter set.
pub struct SisiFixedPointSet(FixedPointSet);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SisiValidation {
    pub is_qso: bool,
    pub is_identity: bool,
    /// Bit `i` is set when admissibility condition `i` (0..9) fails.
    pub violated_mask: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SisiTrajectoryKind {
    Converged,
    MaxIters,
    LeftSimplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SisiRootKind {
    UniquePositive,
    TwoPositive,
    NoPositiveRoot,
}

/// Positive roots of the force equation. For a unique root `lower` and
/// `upper` coincide; without a root both are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SisiRoot {
    pub kind: SisiRootKind,
    pub lower: f64,
    pub upper: f64,
    pub residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SisiLabel {
    Lambda1,
    Lambda2,
    Lambda3,
    Lambda4,
    Lambda15,
    Lambda16,
    Lambda17,
    EndemicLower,
    EndemicUpper,
    Interior,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SisiFixedPoint {
    pub label: SisiLabel,
    pub point: [f64; 4],
    pub fixedness_residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SisiStabilityKind {
    Attracting,
    Repelling,
    Saddle,
    NonHyperbolic,
}

/// Jacobian spectrum sorted by decreasing modulus.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SisiClassification {
    pub kind: SisiStabilityKind,
    pub re: [f64; 4],
    pub im: [f64; 4],
    pub moduli: [f64; 4],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: SisiStatus,
    message: String,
}

impl Failure {
    fn new(status: SisiStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidParameter { .. } => SisiStatus::InvalidParameter,
            Error::NotInSimplex(_) => SisiStatus::NotInSimplex,
            Error::LeftSimplex { .. } => SisiStatus::LeftSimplex,
            Error::DegenerateParameters(_) => SisiStatus::DegenerateParameters,
            Error::InconsistentRoot { .. } => SisiStatus::InconsistentRoot,
            Error::ConvergenceFailure(_) => SisiStatus::ConvergenceFailure,
            Error::PreconditionViolated(_) => SisiStatus::PreconditionViolated,
            Error::NotAFixedPoint { .. } => SisiStatus::NotAFixedPoint,
            Error::InvalidScenarioConfig(_) => SisiStatus::InvalidScenarioConfig,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("nul bytes removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SisiStatus {
    set_last_error(None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SisiStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(Some(failure.message));
            failure.status
        }
        Err(_) => {
            set_last_error(Some("internal panic".into()));
            SisiStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| Failure::new(SisiStatus::NullPointer, format!("{what} is null")))
}

unsafe fn borrow_mut<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| Failure::new(SisiStatus::NullPointer, format!("{what} is null")))
}

unsafe fn read_state(ptr: *const f64) -> Result<SimplexPoint, Failure> {
    if ptr.is_null() {
        return Err(Failure::new(SisiStatus::NullPointer, "state is null"));
    }
    let c = std::ptr::read(ptr as *const [f64; 4]);
    Ok(SimplexPoint::from_array(c)?)
}

unsafe fn write_state(ptr: *mut f64, s: &SimplexPoint) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(Failure::new(SisiStatus::NullPointer, "output state is null"));
    }
    std::ptr::write(ptr as *mut [f64; 4], *s.as_array());
    Ok(())
}

fn label(l: FixedPointLabel) -> SisiLabel {
    match l {
        FixedPointLabel::Lambda1 => SisiLabel::Lambda1,
        FixedPointLabel::Lambda2 => SisiLabel::Lambda2,
        FixedPointLabel::Lambda3 => SisiLabel::Lambda3,
        FixedPointLabel::Lambda4 => SisiLabel::Lambda4,
        FixedPointLabel::Lambda15 => SisiLabel::Lambda15,
        FixedPointLabel::Lambda16 => SisiLabel::Lambda16,
        FixedPointLabel::Lambda17 => SisiLabel::Lambda17,
        FixedPointLabel::EndemicLower => SisiLabel::EndemicLower,
        FixedPointLabel::EndemicUpper => SisiLabel::EndemicUpper,
        FixedPointLabel::Face(_) | FixedPointLabel::Interior => SisiLabel::Interior,
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sisi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sisi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates a parameter handle. Negative or NaN entries are rejected.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sisi_params_new(
    b: f64,
    alpha: f64,
    beta1: f64,
    beta2: f64,
    k1: f64,
    k2: f64,
    out: *mut *mut SisiParams,
) -> SisiStatus {
    guard(|| {
        let slot = borrow_mut(out, "out")?;
        let p = Params::new(b, alpha, beta1, beta2, k1, k2)?;
        *slot = Box::into_raw(Box::new(SisiParams(p)));
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle from [`sisi_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sisi_params_free(params: *mut SisiParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Checks the nine admissibility conditions.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sisi_params_validate(params: *const SisiParams, out: *mut SisiValidation) -> SisiStatus {
    guard(|| {
        let p = &borrow(params, "params")?.0;
        let out = borrow_mut(out, "out")?;
        let report = validate_params(p);
        let mut mask = 0u32;
        for v in &report.violations {
            let i = sisi_core::params::Condition::ALL.iter().position(|c| *c == v.condition).unwrap_or(31);
            mask |= 1 << i;
        }
        *out = SisiValidation { is_qso: report.is_qso, is_identity: report.is_identity, violated_mask: mask };
        Ok(())
    })
}

/// Applies the operator once.
///
/// # Safety
/// `input` must point to 4 readable doubles and `output` to 4 writable ones.
#[no_mangle]
pub unsafe extern "C" fn sisi_apply(params: *const SisiParams, input: *const f64, output: *mut f64) -> SisiStatus {
    guard(|| {
        let p = &borrow(params, "params")?.0;
        let s = read_state(input)?;
        write_state(output, &apply(p, &s)?)
    })
}

/// Iterates from `start` until convergence in sup norm below `tol_conv`,
/// departure from the simplex, or `max_iters` steps.
///
/// # Safety
/// `start` must point to 4 readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sisi_iterate(
    params: *const SisiParams,
    start: *const f64,
    max_iters: u64,
    tol_conv: f64,
    out: *mut *mut SisiTrajectory,
) -> SisiStatus {
    guard(|| {
        let p = &borrow(params, "params")?.0;
        let slot = borrow_mut(out, "out")?;
        let s = read_state(start)?;
        let t = iterate_trajectory(p, &s, max_iters, tol_conv)?;
        *slot = Box::into_raw(Box::new(SisiTrajectory(t)));
        Ok(())
    })
}

/// Number of stored iterates, or 0 for a null handle.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sisi_trajectory_len(trajectory: *const SisiTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.iterates.len())
}

/// Stored iterate `index` and the step number it was taken at.
///
/// # Safety
/// `step` must be writable, `point` must hold 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sisi_trajectory_get(
    trajectory: *const SisiTrajectory,
    index: usize,
    step: *mut u64,
    point: *mut f64,
) -> SisiStatus {
    guard(|| {
        let t = &borrow(trajectory, "trajectory")?.0;
        let step = borrow_mut(step, "step")?;
        let s = t.iterates.get(index).ok_or_else(|| {
            Failure::new(SisiStatus::IndexOutOfRange, format!("index {index} of {}", t.iterates.len()))
        })?;
        write_state(point, s)?;
        *step = t.steps[index];
        Ok(())
    })
}

/// How the run ended. `at_step` is the convergence or exit step, or the
/// number of steps taken when the budget ran out.
///
/// # Safety
/// `kind` and `at_step` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sisi_trajectory_status(
    trajectory: *const SisiTrajectory,
    kind: *mut SisiTrajectoryKind,
    at_step: *mut u64,
) -> SisiStatus {
    guard(|| {
        let t = &borrow(trajectory, "trajectory")?.0;
        let kind = borrow_mut(kind, "kind")?;
        let at_step = borrow_mut(at_step, "at_step")?;
        (*kind, *at_step) = match t.status {
            TrajectoryStatus::Converged { at_step, .. } => (SisiTrajectoryKind::Converged, at_step),
            TrajectoryStatus::MaxItersReached => (SisiTrajectoryKind::MaxIters, t.steps_used()),
            TrajectoryStatus::LeftSimplex { at_step } => (SisiTrajectoryKind::LeftSimplex, at_step),
        };
        Ok(())
    })
}

/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sisi_trajectory_free(trajectory: *mut SisiTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Solves the interior force equation.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sisi_solve_force_equation(params: *const SisiParams, out: *mut SisiRoot) -> SisiStatus {
    guard(|| {
        let p = &borrow(params, "params")?.0;
        let out = borrow_mut(out, "out")?;
        let r = solve_force_equation(p)?;
        let residual = r.residual.unwrap_or(f64::NAN);
        *out = match r.outcome {
            RootOutcome::UniquePositive { force, .. } => {
                SisiRoot { kind: SisiRootKind::UniquePositive, lower: force, upper: force, residual }
            }
            RootOutcome::TwoPositive { lower, upper } => {
                SisiRoot { kind: SisiRootKind::TwoPositive, lower, upper, residual }
            }
            RootOutcome::NoPositiveRoot { .. } => {
                SisiRoot { kind: SisiRootKind::NoPositiveRoot, lower: f64::NAN, upper: f64::NAN, residual }
            }
        };
        Ok(())
    })
}

/// Enumerates the fixed points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sisi_fixed_points(params: *const SisiParams, out: *mut *mut SisiFixedPointSet) -> SisiStatus {
    guard(|| {
        let p = &borrow(params, "params")?.0;
        let slot = borrow_mut(out, "out")?;
        *slot = Box::into_raw(Box::new(SisiFixedPointSet(enumerate_fixed_points(p))));
        Ok(())
    })
}

/// Number of isolated fixed points, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sisi_fixed_point_count(set: *const SisiFixedPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.isolated.len())
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sisi_fixed_point_get(
    set: *const SisiFixedPointSet,
    index: usize,
    out: *mut SisiFixedPoint,
) -> SisiStatus {
    guard(|| {
        let set = &borrow(set, "set")?.0;
        let out = borrow_mut(out, "out")?;
        let r = set.isolated.get(index).ok_or_else(|| {
            Failure::new(SisiStatus::IndexOutOfRange, format!("index {index} of {}", set.isolated.len()))
        })?;
        *out = SisiFixedPoint {
            label: label(r.label),
            point: *r.point.as_array(),
            fixedness_residual: r.fixedness_residual,
        };
        Ok(())
    })
}

/// Number of faces made entirely of fixed points, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sisi_fixed_point_face_count(set: *const SisiFixedPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.faces.len())
}

/// Face `index` as a mask of coordinates pinned to zero: bit 0 for `x`,
/// bit 1 for `u`, bit 2 for `y`, bit 3 for `v`. The whole simplex is 0.
///
/// # Safety
/// `pinned_mask` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sisi_fixed_point_face_get(
    set: *const SisiFixedPointSet,
    index: usize,
    pinned_mask: *mut u8,
) -> SisiStatus {
    guard(|| {
        let set = &borrow(set, "set")?.0;
        let out = borrow_mut(pinned_mask, "pinned_mask")?;
        let face = set.faces.get(index).ok_or_else(|| {
            Failure::new(SisiStatus::IndexOutOfRange, format!("index {index} of {}", set.faces.len()))
        })?;
        *out = face.pinned().iter().fold(0u8, |m, c| m | 1 << c.index());
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sisi_fixed_point_set_free(set: *mut SisiFixedPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Classifies a fixed point by its Jacobian spectrum; moduli within
/// `unit_circle_tol` of 1 count as non-hyperbolic.
///
/// # Safety
/// `point` must point to 4 readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sisi_classify(
    params: *const SisiParams,
    point: *const f64,
    unit_circle_tol: f64,
    out: *mut SisiClassification,
) -> SisiStatus {
    guard(|| {
        let p = &borrow(params, "params")?.0;
        let out = borrow_mut(out, "out")?;
        let s = read_state(point)?;
        let c = classify_fixed_point(p, &s, unit_circle_tol)?;
        let kind = match c.kind {
            StabilityKind::Attracting => SisiStabilityKind::Attracting,
            StabilityKind::Repelling => SisiStabilityKind::Repelling,
            StabilityKind::Saddle => SisiStabilityKind::Saddle,
            StabilityKind::NonHyperbolic => SisiStabilityKind::NonHyperbolic,
        };
        let e = &c.spectrum.eigenvalues;
        *out = SisiClassification {
            kind,
            re: [e[0].re, e[1].re, e[2].re, e[3].re],
            im: [e[0].im, e[1].im, e[2].im, e[3].im],
            moduli: c.spectrum.moduli,
        };
        Ok(())
    })
}
