//! Differential-drive kinematics: wheel speeds to body twist, pose integration
//! and the instantaneous curvature radius.
//!
//! Sign convention: a positive angular rate is counter-clockwise and
//! `omega = (v_r - v_l) / L`, so the curvature radius is
//! `R = v / omega = L (v_r + v_l) / (2 (v_r - v_l))`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Wheel-speed differences below this are treated as straight-line motion.
pub const STRAIGHT_LINE_EPS: f64 = 1e-12;

/// Wraps an angle into `(-PI, PI]`. Values already in range pass through
/// unchanged.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn distance_to(&self, other: &Pose) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

/// Linear speeds of the two wheels, m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WheelSpeeds {
    pub v_l: f64,
    pub v_r: f64,
}

impl WheelSpeeds {
    pub fn new(v_l: f64, v_r: f64) -> Self {
        Self { v_l, v_r }
    }
}

/// Body velocity: forward speed `v` (m/s) and yaw rate `omega` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Twist {
    pub v: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid robot parameter {field} = {value}: must be > 0")]
pub struct InvalidParams {
    pub field: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotParams {
    /// Distance between the wheels, metres.
    pub wheel_base: f64,
    pub wheel_radius: f64,
    /// Upper end of the commanded wheel speed, m/s.
    pub v_max: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        Self {
            wheel_base: 0.5,
            wheel_radius: 0.1,
            v_max: 2.0,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        for (field, value) in [
            ("wheel_base", self.wheel_base),
            ("wheel_radius", self.wheel_radius),
            ("v_max", self.v_max),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(InvalidParams { field, value });
            }
        }
        Ok(())
    }
}

pub fn wheel_to_twist(ws: WheelSpeeds, p: &RobotParams) -> Twist {
    Twist {
        v: 0.5 * (ws.v_r + ws.v_l),
        omega: (ws.v_r - ws.v_l) / p.wheel_base,
    }
}

/// Signed distance from the axle midpoint to the instantaneous centre of
/// curvature. Positive when the centre lies to the robot's left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureRadius {
    Finite(f64),
    Infinite,
}

impl CurvatureRadius {
    pub fn finite(self) -> Option<f64> {
        match self {
            CurvatureRadius::Finite(r) => Some(r),
            CurvatureRadius::Infinite => None,
        }
    }
}

pub fn curvature_radius(ws: WheelSpeeds, p: &RobotParams) -> CurvatureRadius {
    let diff = ws.v_r - ws.v_l;
    if diff.abs() < STRAIGHT_LINE_EPS {
        CurvatureRadius::Infinite
    } else {
        CurvatureRadius::Finite(p.wheel_base * (ws.v_r + ws.v_l) / (2.0 * diff))
    }
}

/// Explicit Euler step of the unicycle model.
pub fn step_euler(pose: Pose, tw: Twist, dt: f64) -> Pose {
    debug_assert!(dt > 0.0);
    Pose {
        x: pose.x + tw.v * pose.theta.cos() * dt,
        y: pose.y + tw.v * pose.theta.sin() * dt,
        theta: wrap_angle(pose.theta + tw.omega * dt),
    }
}

/// Exact solution for a twist held constant over `dt` (a circular arc, or a
/// straight segment when `omega` is negligible).
pub fn step_exact(pose: Pose, tw: Twist, dt: f64) -> Pose {
    debug_assert!(dt > 0.0);
    if tw.omega.abs() < STRAIGHT_LINE_EPS {
        return step_euler(pose, tw, dt);
    }
    let theta_end = pose.theta + tw.omega * dt;
    let radius = tw.v / tw.omega;
    Pose {
        x: pose.x + radius * (theta_end.sin() - pose.theta.sin()),
        y: pose.y - radius * (theta_end.cos() - pose.theta.cos()),
        theta: wrap_angle(theta_end),
    }
}

/// Wheel angular speeds `(omega_r, omega_l)` in rad/s.
pub fn wheel_angular(ws: WheelSpeeds, p: &RobotParams) -> (f64, f64) {
    (ws.v_r / p.wheel_radius, ws.v_l / p.wheel_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> RobotParams {
        RobotParams::default()
    }

    #[test]
    fn twist_examples() {
        let p = params();
        assert_eq!(
            wheel_to_twist(WheelSpeeds::new(1.0, 1.0), &p),
            Twist { v: 1.0, omega: 0.0 }
        );
        assert_eq!(
            wheel_to_twist(WheelSpeeds::new(-1.0, 1.0), &p),
            Twist { v: 0.0, omega: 4.0 }
        );
        assert_eq!(
            wheel_to_twist(WheelSpeeds::new(1.0, 2.0), &p),
            Twist { v: 1.5, omega: 2.0 }
        );
    }

    #[test]
    fn curvature_examples() {
        let p = params();
        assert_eq!(
            curvature_radius(WheelSpeeds::new(0.7, 0.7), &p),
            CurvatureRadius::Infinite
        );
        assert_eq!(
            curvature_radius(WheelSpeeds::new(1.0, 2.0), &p),
            CurvatureRadius::Finite(0.75)
        );
        assert_eq!(
            curvature_radius(WheelSpeeds::new(-1.3, 1.3), &p),
            CurvatureRadius::Finite(0.0)
        );
    }

    #[test]
    fn euler_examples() {
        let p0 = Pose::default();
        assert_eq!(
            step_euler(p0, Twist { v: 1.0, omega: 0.0 }, 0.1),
            Pose::new(0.1, 0.0, 0.0)
        );
        assert_eq!(
            step_euler(p0, Twist { v: 0.0, omega: 1.0 }, 0.1),
            Pose::new(0.0, 0.0, 0.1)
        );
    }

    #[test]
    fn euler_tracks_the_arc() {
        let tw = Twist { v: 1.0, omega: 1.0 };
        let mut pose = Pose::default();
        for _ in 0..100 {
            pose = step_euler(pose, tw, 0.01);
        }
        // Unit circle centred at (0, 1), swept through 1 rad.
        let (ex, ey) = (1.0f64.sin(), 1.0 - 1.0f64.cos());
        let err = (pose.x - ex).hypot(pose.y - ey);
        // Measured 0.004794; frozen as a regression band.
        assert!(err <= 0.02, "err = {err}");
        assert!(err > 0.0047 && err < 0.0049, "regression drift: {err}");
    }

    #[test]
    fn exact_examples() {
        let p0 = Pose::new(0.3, -0.2, 0.4);
        let straight = Twist { v: 1.2, omega: 0.0 };
        assert_eq!(step_exact(p0, straight, 0.1), step_euler(p0, straight, 0.1));

        let half = step_exact(Pose::default(), Twist { v: 1.0, omega: 1.0 }, PI);
        assert!(half.x.abs() < 1e-12);
        assert!((half.y - 2.0).abs() < 1e-12);
        assert!((half.theta - PI).abs() < 1e-12);
    }

    #[test]
    fn wheel_angular_examples() {
        let p = params();
        assert_eq!(wheel_angular(WheelSpeeds::new(0.0, 1.0), &p), (10.0, 0.0));
        let small = RobotParams {
            wheel_radius: 0.05,
            ..p
        };
        assert_eq!(wheel_angular(WheelSpeeds::new(0.0, 0.5), &small).0, 10.0);
    }

    #[test]
    fn wrap_angle_cases() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(0.1), 0.1);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-3.0 * PI / 2.0) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(params().validate().is_ok());
        let bad = RobotParams {
            wheel_base: 0.0,
            ..params()
        };
        assert_eq!(bad.validate().unwrap_err().field, "wheel_base");
    }

    proptest! {
        #[test]
        fn wrap_stays_in_half_open_range(a in -1e6f64..1e6) {
            let w = wrap_angle(a);
            prop_assert!(w > -PI && w <= PI);
            // Same direction as the input.
            prop_assert!((w.sin() - a.sin()).abs() < 1e-6 && (w.cos() - a.cos()).abs() < 1e-6);
        }

        #[test]
        fn twist_is_linear(
            l1 in -3.0f64..3.0, r1 in -3.0f64..3.0,
            l2 in -3.0f64..3.0, r2 in -3.0f64..3.0,
            a in -2.0f64..2.0, b in -2.0f64..2.0,
        ) {
            let p = RobotParams::default();
            let combo = wheel_to_twist(WheelSpeeds::new(a * l1 + b * l2, a * r1 + b * r2), &p);
            let t1 = wheel_to_twist(WheelSpeeds::new(l1, r1), &p);
            let t2 = wheel_to_twist(WheelSpeeds::new(l2, r2), &p);
            prop_assert!((combo.v - (a * t1.v + b * t2.v)).abs() < 1e-12);
            prop_assert!((combo.omega - (a * t1.omega + b * t2.omega)).abs() < 1e-11);
        }

        #[test]
        fn radius_matches_v_over_omega(l in -3.0f64..3.0, r in -3.0f64..3.0) {
            prop_assume!((r - l).abs() > 1e-3);
            let p = RobotParams::default();
            let tw = wheel_to_twist(WheelSpeeds::new(l, r), &p);
            let radius = curvature_radius(WheelSpeeds::new(l, r), &p).finite().unwrap();
            prop_assert!((radius - tw.v / tw.omega).abs() <= 1e-12 * radius.abs().max(1.0));
        }

        #[test]
        fn equal_wheels_keep_heading(
            x in -10.0f64..10.0, y in -10.0f64..10.0, th in -PI..PI,
            v in -2.0f64..2.0, dt in 0.001f64..1.0,
        ) {
            let p = RobotParams::default();
            let pose = Pose::new(x, y, th);
            let tw = wheel_to_twist(WheelSpeeds::new(v, v), &p);
            for next in [step_euler(pose, tw, dt), step_exact(pose, tw, dt)] {
                prop_assert_eq!(next.theta, pose.theta);
                // Displacement is along the heading.
                let cross = (next.x - x) * th.sin() - (next.y - y) * th.cos();
                prop_assert!(cross.abs() < 1e-12);
            }
        }

        #[test]
        fn exact_flow_composes(
            th in -PI..PI, v in -2.0f64..2.0, w in -4.0f64..4.0, dt in 0.01f64..2.0,
        ) {
            prop_assume!(w.abs() > 0.05);
            let pose = Pose::new(0.5, -1.0, th);
            let tw = Twist { v, omega: w };
            let one = step_exact(pose, tw, dt);
            let two = step_exact(step_exact(pose, tw, dt / 2.0), tw, dt / 2.0);
            prop_assert!((one.x - two.x).abs() < 1e-12);
            prop_assert!((one.y - two.y).abs() < 1e-12);
            prop_assert!(wrap_angle(one.theta - two.theta).abs() < 1e-12);
        }
    }
}
