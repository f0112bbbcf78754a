//! Fuzzy-logic goal seeking for a differential-drive robot.
//!
//! * [`engine`]: Mamdani inference over triangular fuzzy sets.
//! * [`rulebase`]: the built-in 3/5/7-term rule grids and a text format.
//! * [`kinematics`]: wheel speeds, body twist and pose integration.
//! * [`navigator`]: controller inputs from pose and goal.
//! * [`sim`]: closed-loop runs and controller comparison.
//! * [`cli`]: the `fuzzy-nav` command line.

pub mod cli;
pub mod engine;
pub mod kinematics;
pub mod navigator;
pub mod rulebase;
pub mod sim;

pub use engine::{Fis, Inference, LinguisticVariable, TriangularMf};
pub use kinematics::{Pose, RobotParams, Twist, WheelSpeeds};
pub use navigator::{Errors, Goal, Navigator};
pub use rulebase::{builtin, GridSize, RuleBase};
pub use sim::{Controller, Metrics, Scenario};
