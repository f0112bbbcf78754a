use std::ffi::{CStr, CString};
use std::ptr;

use fuzzy_nav_ffi::*;

fn last_error() -> String {
    let p = fnav_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn builtin(terms: u32) -> *mut FnavController {
    let mut c = ptr::null_mut();
    assert_eq!(
        unsafe { fnav_controller_new_builtin(terms, &mut c) },
        FnavStatus::Ok
    );
    assert!(!c.is_null());
    c
}

#[test]
fn builtin_controllers_report_rule_counts() {
    for (terms, rules) in [(3, 9), (5, 25), (7, 49)] {
        let c = builtin(terms);
        let mut n = 0usize;
        assert_eq!(
            unsafe { fnav_controller_rule_count(c, &mut n) },
            FnavStatus::Ok
        );
        assert_eq!(n, rules);
        unsafe { fnav_controller_free(c) };
    }
}

#[test]
fn unknown_grid_size_is_rejected() {
    let mut c = ptr::null_mut();
    let status = unsafe { fnav_controller_new_builtin(4, &mut c) };
    assert_eq!(status, FnavStatus::InvalidArgument);
    assert!(c.is_null());
    assert!(last_error().contains("3, 5 or 7"));
}

#[test]
fn inference_matches_the_library() {
    let c = builtin(5);
    let fis = fuzzy_nav::Fis::new(fuzzy_nav::builtin(fuzzy_nav::GridSize::Five)).unwrap();
    for (e_theta, e_d) in [(0.0, 3.0), (0.7, 10.0), (-2.5, 0.4), (3.0, 20.0)] {
        let mut w = FnavWheelSpeeds {
            v_l: -1.0,
            v_r: -1.0,
        };
        assert_eq!(
            unsafe { fnav_controller_infer(c, e_theta, e_d, &mut w) },
            FnavStatus::Ok
        );
        let inf = fis.infer(e_theta, e_d);
        assert_eq!((w.v_l, w.v_r), (inf.v_l(), inf.v_r()));
    }
    let mut w = FnavWheelSpeeds { v_l: 0.0, v_r: 0.0 };
    assert_eq!(
        unsafe { fnav_controller_infer(c, f64::NAN, 1.0, &mut w) },
        FnavStatus::InvalidArgument
    );
    unsafe { fnav_controller_free(c) };
}

#[test]
fn null_pointers_are_reported() {
    let mut n = 0usize;
    assert_eq!(
        unsafe { fnav_controller_rule_count(ptr::null(), &mut n) },
        FnavStatus::NullPointer
    );
    assert_eq!(
        unsafe { fnav_controller_new_builtin(3, ptr::null_mut()) },
        FnavStatus::NullPointer
    );
    unsafe {
        fnav_controller_free(ptr::null_mut());
        fnav_string_free(ptr::null_mut());
    }
}

#[test]
fn kinematics_round_trip() {
    let params = FnavRobotParams {
        wheel_base: 0.5,
        wheel_radius: 0.1,
        v_max: 2.0,
    };
    let mut tw = FnavTwist { v: 0.0, omega: 0.0 };
    let ws = FnavWheelSpeeds { v_l: 1.0, v_r: 2.0 };
    assert_eq!(
        unsafe { fnav_wheel_to_twist(&params, ws, &mut tw) },
        FnavStatus::Ok
    );
    assert_eq!(tw, FnavTwist { v: 1.5, omega: 2.0 });

    let mut pose = FnavPose {
        x: 0.0,
        y: 0.0,
        theta: 0.0,
    };
    assert_eq!(
        unsafe { fnav_step_euler(&mut pose, tw, 0.1) },
        FnavStatus::Ok
    );
    assert!((pose.x - 0.15).abs() < 1e-15 && pose.y == 0.0 && (pose.theta - 0.2).abs() < 1e-15);

    let mut arc = FnavPose {
        x: 0.0,
        y: 0.0,
        theta: 0.0,
    };
    assert_eq!(
        unsafe { fnav_step_exact(&mut arc, tw, 0.1) },
        FnavStatus::Ok
    );
    assert!(arc.y > 0.0);

    let mut e = FnavErrors {
        e_d: 0.0,
        e_theta: 0.0,
    };
    let origin = FnavPose {
        x: 0.0,
        y: 0.0,
        theta: 0.0,
    };
    assert_eq!(
        unsafe { fnav_compute_errors(&origin, 0.0, 2.0, &mut e) },
        FnavStatus::Ok
    );
    assert_eq!(e.e_d, 2.0);
    assert!((e.e_theta - std::f64::consts::FRAC_PI_2).abs() < 1e-15);

    let bad = FnavRobotParams {
        wheel_base: 0.0,
        ..params
    };
    assert_eq!(
        unsafe { fnav_wheel_to_twist(&bad, ws, &mut tw) },
        FnavStatus::InvalidArgument
    );
    assert!(last_error().contains("wheel_base"));
}

#[test]
fn exported_rules_validate_and_load() {
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { fnav_export_rules(7, &mut text) }, FnavStatus::Ok);
    let mut diags = ptr::null_mut();
    assert_eq!(
        unsafe { fnav_validate_rules(text, &mut diags) },
        FnavStatus::Ok
    );
    assert!(diags.is_null());
    let mut c = ptr::null_mut();
    assert_eq!(
        unsafe { fnav_controller_from_rules(text, &mut c) },
        FnavStatus::Ok
    );
    let mut n = 0usize;
    unsafe { fnav_controller_rule_count(c, &mut n) };
    assert_eq!(n, 49);
    unsafe {
        fnav_controller_free(c);
        fnav_string_free(text);
    }
}

#[test]
fn invalid_rules_return_diagnostics() {
    let empty = CString::new("").unwrap();
    let mut diags = ptr::null_mut();
    assert_eq!(
        unsafe { fnav_validate_rules(empty.as_ptr(), &mut diags) },
        FnavStatus::InvalidRules
    );
    let msg = unsafe { CStr::from_ptr(diags) }
        .to_str()
        .unwrap()
        .to_owned();
    assert!(msg.contains("no variables defined"), "{msg}");
    unsafe { fnav_string_free(diags) };

    let mut c = ptr::null_mut();
    assert_eq!(
        unsafe { fnav_controller_from_rules(empty.as_ptr(), &mut c) },
        FnavStatus::InvalidRules
    );
    assert!(c.is_null());
}

#[test]
fn benchmark_scenario_runs() {
    let sc =
        fuzzy_nav::Scenario::benchmark(fuzzy_nav::Controller::Builtin(fuzzy_nav::GridSize::Three));
    let text = CString::new(sc.to_toml()).unwrap();
    let mut m = std::mem::MaybeUninit::<FnavMetrics>::uninit();
    assert_eq!(
        unsafe { fnav_run_scenario(text.as_ptr(), m.as_mut_ptr()) },
        FnavStatus::Ok
    );
    let m = unsafe { m.assume_init() };
    let lib = fuzzy_nav::sim::run(&sc).unwrap();
    assert!(m.reached && m.has_time_to_target);
    assert_eq!(Some(m.time_to_target), lib.metrics.time_to_target);
    assert_eq!(m.rule_count, 9);
    assert_eq!(m.samples, lib.trajectory.len());
}

#[test]
fn bad_scenario_names_the_field() {
    let sc =
        fuzzy_nav::Scenario::benchmark(fuzzy_nav::Controller::Builtin(fuzzy_nav::GridSize::Three))
            .to_toml()
            .replace("dt = 0.1", "dt = 0.0");
    let text = CString::new(sc).unwrap();
    let mut m = std::mem::MaybeUninit::<FnavMetrics>::uninit();
    assert_eq!(
        unsafe { fnav_run_scenario(text.as_ptr(), m.as_mut_ptr()) },
        FnavStatus::InvalidScenario
    );
    assert!(last_error().contains("dt"));
}
