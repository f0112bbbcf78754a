//! C ABI over `fuzzy-nav`.
//!
//! Every fallible function returns an [`FnavStatus`]; on failure the message
//! is available from [`fnav_last_error`] on the same thread. Controllers are
//! opaque handles released with [`fnav_controller_free`]; strings returned to
//! the caller are released with [`fnav_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fuzzy_nav::kinematics::{self, Pose, RobotParams, Twist, WheelSpeeds};
use fuzzy_nav::navigator::{compute_errors, Goal};
use fuzzy_nav::rulebase::{builtin, parse_rulebase, render, GridSize};
use fuzzy_nav::{sim, Fis, Scenario};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FnavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    InvalidRules = 4,
    InvalidScenario = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnavPose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnavWheelSpeeds {
    pub v_l: f64,
    pub v_r: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnavTwist {
    pub v: f64,
    pub omega: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnavRobotParams {
    pub wheel_base: f64,
    pub wheel_radius: f64,
    pub v_max: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnavErrors {
    pub e_d: f64,
    pub e_theta: f64,
}

/// Run summary. Times are NaN when the matching `has_` flag is false.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnavMetrics {
    pub reached: bool,
    pub has_time_to_target: bool,
    pub time_to_target: f64,
    pub has_time_angle_aligned: bool,
    pub time_angle_aligned: f64,
    pub path_length: f64,
    pub rule_count: usize,
    /// Number of trajectory samples, including the initial one.
    pub samples: usize,
}

/// Opaque inference handle.
pub struct FnavController {
    fis: Fis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: FnavStatus, msg: impl Into<String>) -> FnavStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> FnavStatus) -> FnavStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(FnavStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FnavStatus> {
    if s.is_null() {
        return Err(fail(FnavStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(FnavStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

fn grid_size(terms: u32) -> Result<GridSize, FnavStatus> {
    match terms {
        3 => Ok(GridSize::Three),
        5 => Ok(GridSize::Five),
        7 => Ok(GridSize::Seven),
        n => Err(fail(
            FnavStatus::InvalidArgument,
            format!("unknown grid size {n}; expected 3, 5 or 7"),
        )),
    }
}

macro_rules! out_ref {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(r) => r,
            None => return fail(FnavStatus::NullPointer, "null output pointer"),
        }
    };
}

macro_rules! in_ref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => return fail(FnavStatus::NullPointer, "null input pointer"),
        }
    };
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fnav_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a controller from a built-in grid with 3, 5 or 7 terms per variable.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn fnav_controller_new_builtin(
    terms: u32,
    out: *mut *mut FnavController,
) -> FnavStatus {
    guard(|| {
        let out = out_ref!(out);
        *out = ptr::null_mut();
        let size = try_status!(grid_size(terms));
        let fis = Fis::new(builtin(size)).expect("built-in rule bases are valid");
        *out = Box::into_raw(Box::new(FnavController { fis }));
        FnavStatus::Ok
    })
}

/// Creates a controller from rules file text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_controller_from_rules(
    text: *const c_char,
    out: *mut *mut FnavController,
) -> FnavStatus {
    guard(|| {
        let out = out_ref!(out);
        *out = ptr::null_mut();
        let text = try_status!(read_str(text));
        let rb = match parse_rulebase(text) {
            Ok(rb) => rb,
            Err(diags) => {
                let msg: Vec<String> = diags.iter().map(ToString::to_string).collect();
                return fail(FnavStatus::InvalidRules, msg.join("\n"));
            }
        };
        match Fis::new(rb) {
            Ok(fis) => {
                *out = Box::into_raw(Box::new(FnavController { fis }));
                FnavStatus::Ok
            }
            Err(e) => fail(FnavStatus::InvalidRules, e.to_string()),
        }
    })
}

/// Releases a controller. NULL is ignored.
///
/// # Safety
/// `ctrl` must come from a constructor in this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn fnav_controller_free(ctrl: *mut FnavController) {
    if !ctrl.is_null() {
        drop(Box::from_raw(ctrl));
    }
}

/// # Safety
/// `ctrl` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_controller_rule_count(
    ctrl: *const FnavController,
    out: *mut usize,
) -> FnavStatus {
    guard(|| {
        let ctrl = in_ref!(ctrl);
        *out_ref!(out) = ctrl.fis.rulebase().rule_count();
        FnavStatus::Ok
    })
}

/// Wheel speeds for a heading error (rad) and distance error (m). Inputs
/// outside the universes are clamped.
///
/// # Safety
/// `ctrl` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_controller_infer(
    ctrl: *const FnavController,
    e_theta: f64,
    e_d: f64,
    out: *mut FnavWheelSpeeds,
) -> FnavStatus {
    guard(|| {
        let ctrl = in_ref!(ctrl);
        let out = out_ref!(out);
        if !e_theta.is_finite() || !e_d.is_finite() {
            return fail(FnavStatus::InvalidArgument, "inputs must be finite");
        }
        let inf = ctrl.fis.infer(e_theta, e_d);
        *out = FnavWheelSpeeds {
            v_l: inf.v_l(),
            v_r: inf.v_r(),
        };
        FnavStatus::Ok
    })
}

/// # Safety
/// `pose` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_compute_errors(
    pose: *const FnavPose,
    goal_x: f64,
    goal_y: f64,
    out: *mut FnavErrors,
) -> FnavStatus {
    guard(|| {
        let p = in_ref!(pose);
        let e = compute_errors(&Pose::new(p.x, p.y, p.theta), &Goal::new(goal_x, goal_y));
        *out_ref!(out) = FnavErrors {
            e_d: e.e_d,
            e_theta: e.e_theta,
        };
        FnavStatus::Ok
    })
}

fn robot_params(p: &FnavRobotParams) -> Result<RobotParams, FnavStatus> {
    let params = RobotParams {
        wheel_base: p.wheel_base,
        wheel_radius: p.wheel_radius,
        v_max: p.v_max,
    };
    params
        .validate()
        .map_err(|e| fail(FnavStatus::InvalidArgument, e.to_string()))?;
    Ok(params)
}

/// # Safety
/// `params` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_wheel_to_twist(
    params: *const FnavRobotParams,
    wheels: FnavWheelSpeeds,
    out: *mut FnavTwist,
) -> FnavStatus {
    guard(|| {
        let params = try_status!(robot_params(in_ref!(params)));
        let tw = kinematics::wheel_to_twist(WheelSpeeds::new(wheels.v_l, wheels.v_r), &params);
        *out_ref!(out) = FnavTwist {
            v: tw.v,
            omega: tw.omega,
        };
        FnavStatus::Ok
    })
}

fn step(
    pose: *mut FnavPose,
    twist: FnavTwist,
    dt: f64,
    f: fn(Pose, Twist, f64) -> Pose,
) -> FnavStatus {
    let p = out_ref!(pose);
    if !(dt.is_finite() && dt >= 0.0) {
        return fail(
            FnavStatus::InvalidArgument,
            "dt must be finite and non-negative",
        );
    }
    let next = f(
        Pose::new(p.x, p.y, p.theta),
        Twist {
            v: twist.v,
            omega: twist.omega,
        },
        dt,
    );
    *p = FnavPose {
        x: next.x,
        y: next.y,
        theta: next.theta,
    };
    FnavStatus::Ok
}

/// Advances `pose` in place by one forward-Euler step.
///
/// # Safety
/// `pose` must be readable and writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_step_euler(
    pose: *mut FnavPose,
    twist: FnavTwist,
    dt: f64,
) -> FnavStatus {
    guard(|| step(pose, twist, dt, kinematics::step_euler))
}

/// Advances `pose` in place along the exact constant-twist arc.
///
/// # Safety
/// `pose` must be readable and writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_step_exact(
    pose: *mut FnavPose,
    twist: FnavTwist,
    dt: f64,
) -> FnavStatus {
    guard(|| step(pose, twist, dt, kinematics::step_exact))
}

/// Runs a scenario given as TOML text. Relative rules-file paths resolve
/// against the current directory.
///
/// # Safety
/// `scenario_toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_run_scenario(
    scenario_toml: *const c_char,
    out: *mut FnavMetrics,
) -> FnavStatus {
    guard(|| {
        let text = try_status!(read_str(scenario_toml));
        let out = out_ref!(out);
        let sc = match Scenario::from_toml_str(text, None) {
            Ok(sc) => sc,
            Err(e @ sim::ConfigError::Rules { .. }) => {
                return fail(FnavStatus::InvalidRules, e.to_string())
            }
            Err(e) => return fail(FnavStatus::InvalidScenario, e.to_string()),
        };
        let run = match sim::run(&sc) {
            Ok(r) => r,
            Err(e) => return fail(FnavStatus::InvalidScenario, e.to_string()),
        };
        let m = &run.metrics;
        *out = FnavMetrics {
            reached: m.reached,
            has_time_to_target: m.time_to_target.is_some(),
            time_to_target: m.time_to_target.unwrap_or(f64::NAN),
            has_time_angle_aligned: m.time_angle_aligned.is_some(),
            time_angle_aligned: m.time_angle_aligned.unwrap_or(f64::NAN),
            path_length: m.path_length,
            rule_count: m.rule_count,
            samples: run.trajectory.len(),
        };
        FnavStatus::Ok
    })
}

/// Renders a built-in rule base as rules file text. Free the result with
/// [`fnav_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_export_rules(terms: u32, out: *mut *mut c_char) -> FnavStatus {
    guard(|| {
        let out = out_ref!(out);
        *out = ptr::null_mut();
        let size = try_status!(grid_size(terms));
        *out = into_c_string(render(&builtin(size)));
        FnavStatus::Ok
    })
}

/// Validates rules file text. Returns `FNAV_STATUS_INVALID_RULES` and stores
/// the diagnostics, one per line, in `*diagnostics` (free with
/// [`fnav_string_free`]); on success `*diagnostics` is NULL.
///
/// # Safety
/// `text` must be a NUL-terminated string; `diagnostics` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fnav_validate_rules(
    text: *const c_char,
    diagnostics: *mut *mut c_char,
) -> FnavStatus {
    guard(|| {
        let diagnostics = out_ref!(diagnostics);
        *diagnostics = ptr::null_mut();
        let text = try_status!(read_str(text));
        match parse_rulebase(text) {
            Ok(_) => FnavStatus::Ok,
            Err(diags) => {
                let lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
                let joined = lines.join("\n");
                *diagnostics = into_c_string(joined.clone());
                fail(FnavStatus::InvalidRules, joined)
            }
        }
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn fnav_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
