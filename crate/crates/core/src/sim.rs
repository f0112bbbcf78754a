//! Closed-loop simulation of the fuzzy navigator driving the kinematic model,
//! and the metrics used to compare controllers.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{EngineError, Fis};
use crate::kinematics::{step_euler, wheel_to_twist, Pose, RobotParams, WheelSpeeds};
use crate::navigator::{compute_errors, Errors, Goal, Navigator};
use crate::rulebase::{
    builtin_with, parse_rulebase, Diagnostic, GridSize, Layout, RuleBase, BENCHMARK_DISTANCE,
    DISTANCE_RANGE_FRACTION,
};

/// Smallest distance universe laid out for built-in controllers, metres.
pub const MIN_DISTANCE_RANGE: f64 = 1.0;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid scenario: {field} {reason}")]
    InvalidScenario { field: &'static str, reason: String },
    #[error("controller '{name}' is not usable: {source}")]
    Controller { name: String, source: EngineError },
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("unknown controller '{0}'; valid choices are 3, 5, 7 (or three, five, seven) or a path to a rules file")]
    UnknownController(String),
    #[error("rules file {path}:\n{}", render_diagnostics(.diagnostics))]
    Rules {
        path: PathBuf,
        diagnostics: Vec<Diagnostic>,
    },
    #[error(transparent)]
    Invalid(#[from] SimError),
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Which rule base drives the robot.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Controller {
    /// A built-in grid, laid out over the scenario's distance and speed range.
    Builtin(GridSize),
    /// A rule base loaded from a file, used with its own universes.
    Custom { name: String, rulebase: RuleBase },
}

impl Controller {
    pub fn name(&self) -> String {
        match self {
            Controller::Builtin(size) => size.name().to_string(),
            Controller::Custom { name, .. } => name.clone(),
        }
    }

    /// Resolves `3|5|7|three|five|seven`, or else a rules file path relative
    /// to `base_dir`.
    pub fn resolve(choice: &str, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        if let Ok(size) = choice.parse::<GridSize>() {
            return Ok(Controller::Builtin(size));
        }
        let path = match base_dir {
            Some(dir) if Path::new(choice).is_relative() => dir.join(choice),
            _ => PathBuf::from(choice),
        };
        if !path.is_file() {
            return Err(ConfigError::UnknownController(choice.to_string()));
        }
        let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
            path: path.clone(),
            source,
        })?;
        let rulebase = parse_rulebase(&text).map_err(|diagnostics| ConfigError::Rules {
            path: path.clone(),
            diagnostics,
        })?;
        Ok(Controller::Custom {
            name: choice.to_string(),
            rulebase,
        })
    }
}

impl fmt::Display for Controller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Scenario file layout. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub start: Pose,
    pub goal: Goal,
    pub dt: f64,
    pub max_time: f64,
    pub goal_tol: f64,
    pub angle_tol: f64,
    #[serde(default)]
    pub params: RobotParams,
    #[serde(default = "default_controller")]
    pub controller: String,
}

fn default_controller() -> String {
    "3".into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub start: Pose,
    pub goal: Goal,
    /// Control period, seconds.
    pub dt: f64,
    pub max_time: f64,
    /// Reached once the distance error is at most this, metres.
    pub goal_tol: f64,
    /// Aligned once the heading error magnitude is at most this, radians.
    pub angle_tol: f64,
    pub params: RobotParams,
    pub controller: Controller,
}

impl Scenario {
    /// Start at the origin facing +x, goal [`BENCHMARK_DISTANCE`] away at the
    /// given bearing (radians), sampled every 0.1 s for at most 120 s.
    pub fn benchmark_with_bearing(controller: Controller, bearing: f64) -> Self {
        Self {
            start: Pose::new(0.0, 0.0, 0.0),
            goal: Goal::new(
                BENCHMARK_DISTANCE * bearing.cos(),
                BENCHMARK_DISTANCE * bearing.sin(),
            ),
            dt: 0.1,
            max_time: 120.0,
            goal_tol: 0.1,
            angle_tol: 0.05,
            params: RobotParams::default(),
            controller,
        }
    }

    /// The benchmark with the goal at a 45 degree bearing.
    pub fn benchmark(controller: Controller) -> Self {
        Self::benchmark_with_bearing(controller, std::f64::consts::FRAC_PI_4)
    }

    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        let file: ScenarioFile = toml::from_str(text)?;
        let controller = Controller::resolve(&file.controller, base_dir)?;
        let sc = Scenario {
            start: Pose::new(file.start.x, file.start.y, file.start.theta),
            goal: file.goal,
            dt: file.dt,
            max_time: file.max_time,
            goal_tol: file.goal_tol,
            angle_tol: file.angle_tol,
            params: file.params,
            controller,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path.parent())
    }

    /// Scenario file text. Custom controllers are written by name.
    pub fn to_toml(&self) -> String {
        let file = ScenarioFile {
            start: self.start,
            goal: self.goal,
            dt: self.dt,
            max_time: self.max_time,
            goal_tol: self.goal_tol,
            angle_tol: self.angle_tol,
            params: self.params,
            controller: match &self.controller {
                Controller::Builtin(size) => size.terms().to_string(),
                Controller::Custom { name, .. } => name.clone(),
            },
        };
        toml::to_string(&file).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let invalid = |field, reason: String| Err(SimError::InvalidScenario { field, reason });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(
                "dt",
                format!("must be a positive number of seconds (got {})", self.dt),
            );
        }
        if !(self.max_time >= self.dt && self.max_time.is_finite()) {
            return invalid(
                "max_time",
                format!("must be at least dt = {} (got {})", self.dt, self.max_time),
            );
        }
        if !(self.goal_tol > 0.0 && self.goal_tol.is_finite()) {
            return invalid("goal_tol", format!("must be > 0 (got {})", self.goal_tol));
        }
        if !(self.angle_tol > 0.0 && self.angle_tol.is_finite()) {
            return invalid("angle_tol", format!("must be > 0 (got {})", self.angle_tol));
        }
        if let Err(e) = self.params.validate() {
            return invalid("params", e.to_string());
        }
        let s = self.start;
        if !(s.x.is_finite() && s.y.is_finite() && s.theta.is_finite()) {
            return invalid("start", "must be finite".into());
        }
        if !(self.goal.x.is_finite() && self.goal.y.is_finite()) {
            return invalid("goal", "must be finite".into());
        }
        Ok(())
    }

    /// Universes for built-in controllers: distance up to
    /// [`DISTANCE_RANGE_FRACTION`] of the initial distance error (at least
    /// [`MIN_DISTANCE_RANGE`]), speed up to `v_max`.
    pub fn layout(&self) -> Layout {
        let initial = compute_errors(&self.start, &self.goal).e_d;
        Layout {
            distance_max: (initial * DISTANCE_RANGE_FRACTION).max(MIN_DISTANCE_RANGE),
            v_max: self.params.v_max,
            ..Layout::default()
        }
    }

    pub fn rulebase(&self) -> Result<RuleBase, SimError> {
        match &self.controller {
            Controller::Builtin(size) => {
                builtin_with(*size, &self.layout()).map_err(|source| SimError::Controller {
                    name: size.name().into(),
                    source,
                })
            }
            Controller::Custom { rulebase, .. } => Ok(rulebase.clone()),
        }
    }

    pub fn fis(&self) -> Result<Fis, SimError> {
        Fis::new(self.rulebase()?).map_err(|source| SimError::Controller {
            name: self.controller.name(),
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub pose: Pose,
    pub errors: Errors,
    /// Command issued at `t`; zero on the terminal sample.
    pub wheels: WheelSpeeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub reached: bool,
    pub time_to_target: Option<f64>,
    pub time_angle_aligned: Option<f64>,
    pub path_length: f64,
    pub rule_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trajectory: Vec<TrajectorySample>,
    pub metrics: Metrics,
}

/// Runs the closed loop until the goal is reached or `max_time` elapses.
///
/// Each step computes the errors, records a sample, checks termination and
/// only then actuates, so a scenario starting on the goal never moves.
/// Sample `k` is stamped `k * dt`.
pub fn run(sc: &Scenario) -> Result<RunOutput, SimError> {
    sc.validate()?;
    let fis = sc.fis()?;
    let rule_count = fis.rulebase().rule_count();
    let nav = Navigator::new(fis);

    let mut pose = sc.start;
    let mut trajectory = Vec::new();
    let mut aligned = None;
    let mut path_length = 0.0;
    let mut k: u64 = 0;
    let reached = loop {
        let t = k as f64 * sc.dt;
        let errors = compute_errors(&pose, &sc.goal);
        if aligned.is_none() && errors.e_theta.abs() <= sc.angle_tol {
            aligned = Some(t);
        }
        let reached = errors.e_d <= sc.goal_tol;
        if reached || t >= sc.max_time - 1e-9 * sc.dt {
            trajectory.push(TrajectorySample {
                t,
                pose,
                errors,
                wheels: WheelSpeeds::default(),
            });
            break reached;
        }
        let wheels = nav.control_step(errors);
        trajectory.push(TrajectorySample {
            t,
            pose,
            errors,
            wheels,
        });
        let next = step_euler(pose, wheel_to_twist(wheels, &sc.params), sc.dt);
        path_length += pose.distance_to(&next);
        pose = next;
        k += 1;
    };

    let metrics = Metrics {
        reached,
        time_to_target: reached.then(|| trajectory.last().map(|s| s.t)).flatten(),
        time_angle_aligned: aligned,
        path_length,
        rule_count,
    };
    Ok(RunOutput {
        trajectory,
        metrics,
    })
}

#[derive(Debug)]
pub struct ComparisonRow {
    pub controller: String,
    pub outcome: Result<RunOutput, SimError>,
}

impl ComparisonRow {
    pub fn metrics(&self) -> Option<&Metrics> {
        self.outcome.as_ref().ok().map(|o| &o.metrics)
    }
}

/// Runs the template once per controller. Runs execute concurrently; rows
/// follow the order of `controllers`.
pub fn compare(template: &Scenario, controllers: &[Controller]) -> Vec<ComparisonRow> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = controllers
            .iter()
            .map(|c| {
                let sc = Scenario {
                    controller: c.clone(),
                    ..template.clone()
                };
                scope.spawn(move || ComparisonRow {
                    controller: c.name(),
                    outcome: run(&sc),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

/// Whether the three built-in controllers finish in 3-term, 5-term, 7-term
/// order (strictly). `None` when a built-in row is absent or did not reach.
pub fn fewest_terms_fastest(rows: &[ComparisonRow]) -> Option<bool> {
    let time = |size: GridSize| {
        rows.iter()
            .find(|r| r.controller == size.name())
            .and_then(|r| r.metrics())
            .and_then(|m| m.time_to_target)
    };
    let (t3, t5, t7) = (
        time(GridSize::Three)?,
        time(GridSize::Five)?,
        time(GridSize::Seven)?,
    );
    Some(t3 < t5 && t5 < t7)
}
