//! Goal-seeking loop closure: pose and goal to controller inputs, controller
//! outputs to wheel speeds.

use serde::{Deserialize, Serialize};

use crate::engine::{Fis, Inference};
use crate::kinematics::{wrap_angle, Pose, WheelSpeeds};

/// Distances below this mean the robot sits on the goal.
pub const COINCIDENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Goal {
    pub x: f64,
    pub y: f64,
}

impl Goal {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Controller inputs: distance to the goal (m) and heading error (rad, in
/// `(-PI, PI]`, positive when the goal lies to the left).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Errors {
    pub e_d: f64,
    pub e_theta: f64,
}

pub fn compute_errors(pose: &Pose, goal: &Goal) -> Errors {
    let (dx, dy) = (goal.x - pose.x, goal.y - pose.y);
    let e_d = dx.hypot(dy);
    if e_d < COINCIDENT_EPS {
        // Bearing is undefined on the goal; steer straight.
        return Errors { e_d, e_theta: 0.0 };
    }
    Errors {
        e_d,
        e_theta: wrap_angle(dy.atan2(dx) - pose.theta),
    }
}

#[derive(Debug, Clone)]
pub struct Navigator {
    fis: Fis,
}

impl Navigator {
    pub fn new(fis: Fis) -> Self {
        Self { fis }
    }

    pub fn fis(&self) -> &Fis {
        &self.fis
    }

    pub fn infer(&self, errors: Errors) -> Inference {
        self.fis.infer(errors.e_theta, errors.e_d)
    }

    /// Wheel speeds for the given errors. An empty output aggregation falls
    /// back to the universe midpoint and is logged.
    pub fn control_step(&self, errors: Errors) -> WheelSpeeds {
        let out = self.infer(errors);
        if out.right.zero_area || out.left.zero_area {
            log::warn!(
                "zero-area output (right: {}, left: {}) at e_d = {}, e_theta = {}",
                out.right.zero_area,
                out.left.zero_area,
                errors.e_d,
                errors.e_theta
            );
        }
        WheelSpeeds {
            v_l: out.v_l(),
            v_r: out.v_r(),
        }
    }
}
