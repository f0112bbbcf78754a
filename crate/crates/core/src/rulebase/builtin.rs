use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{GridSize, Rule, RuleBase, ANGLE, DISTANCE, LEFT, RIGHT};
use crate::engine::{EngineError, LinguisticVariable};

/// Start-to-goal distance of the reference benchmark, in metres.
pub const BENCHMARK_DISTANCE: f64 = 24.41;

/// The distance universe spans this fraction of the initial distance error.
/// Spanning the whole approach lets max-aggregation swallow small steering
/// corrections while the middle distance terms fire.
pub const DISTANCE_RANGE_FRACTION: f64 = 0.5;

/// Universes used to lay out the built-in terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    /// Angle error universe, radians.
    pub angle_min: f64,
    pub angle_max: f64,
    /// Upper end of the distance error universe `[0, distance_max]`, metres.
    pub distance_max: f64,
    /// Upper end of both wheel speed universes `[0, v_max]`, m/s.
    pub v_max: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Self {
            angle_min: -PI,
            angle_max: PI,
            distance_max: BENCHMARK_DISTANCE * DISTANCE_RANGE_FRACTION,
            v_max: 2.0,
        }
    }
}

struct Grid {
    /// Angle terms, most negative first. These are the table rows.
    rows: &'static [&'static str],
    /// Distance terms in table column order, farthest first.
    columns: &'static [&'static str],
    /// Output terms, slowest first.
    outputs: &'static [&'static str],
    right: &'static [&'static [&'static str]],
    left: &'static [&'static [&'static str]],
}

const THREE: Grid = Grid {
    rows: &["N", "Z", "P"],
    columns: &["F", "M", "Z"],
    outputs: &["S", "M", "F"],
    right: &[&["M", "M", "S"], &["F", "M", "S"], &["F", "F", "F"]],
    left: &[&["F", "F", "M"], &["F", "M", "S"], &["M", "M", "S"]],
};

const FIVE: Grid = Grid {
    rows: &["SN", "N", "Z", "P", "BP"],
    columns: &["VF", "F", "M", "N", "Z"],
    outputs: &["VS", "S", "M", "F", "VF"],
    right: &[
        &["M", "S", "VS", "VS", "VS"],
        &["F", "M", "S", "VS", "VS"],
        &["VF", "F", "M", "S", "VS"],
        &["VF", "F", "M", "S", "S"],
        &["VF", "F", "F", "M", "M"],
    ],
    left: &[
        &["VF", "F", "F", "M", "M"],
        &["VF", "F", "M", "S", "S"],
        &["VF", "F", "M", "S", "VS"],
        &["F", "M", "S", "VS", "VS"],
        &["M", "S", "VS", "VS", "VS"],
    ],
};

// The published tables print two cells as plain "VF" (right VBP/F and
// left VSN/F); both are the VF1 term here.
const SEVEN: Grid = Grid {
    rows: &["VSN", "SN", "N", "Z", "P", "BP", "VBP"],
    columns: &["VBP", "VF", "F", "M", "N", "VNZ", "Z"],
    outputs: &["VS2", "VS1", "S", "M", "F", "VF1", "VF2"],
    right: &[
        &["M", "F", "S", "VS1", "VS1", "VS2", "VS2"],
        &["F", "M", "S", "VS1", "VS1", "VS1", "VS2"],
        &["VF1", "F", "M", "S", "VS1", "VS1", "VS2"],
        &["VF2", "VF1", "F", "M", "S", "VS1", "VS2"],
        &["VF2", "VF1", "F", "M", "S", "S", "VS1"],
        &["VF2", "VF1", "F", "F", "M", "M", "S"],
        &["VF2", "VF2", "VF1", "F", "M", "M", "S"],
    ],
    left: &[
        &["VF2", "VF2", "VF1", "F", "M", "M", "S"],
        &["VF2", "VF1", "F", "F", "M", "M", "S"],
        &["VF2", "VF1", "F", "M", "S", "S", "VS1"],
        &["VF2", "VF1", "F", "M", "S", "VS1", "VS2"],
        &["VF1", "F", "M", "S", "VS1", "VS1", "VS2"],
        &["F", "M", "S", "VS1", "VS1", "VS1", "VS2"],
        &["M", "F", "S", "VS1", "VS1", "VS2", "VS2"],
    ],
};

fn grid(size: GridSize) -> &'static Grid {
    match size {
        GridSize::Three => &THREE,
        GridSize::Five => &FIVE,
        GridSize::Seven => &SEVEN,
    }
}

/// Built-in rule base with the default layout.
pub fn builtin(size: GridSize) -> RuleBase {
    builtin_with(size, &Layout::default()).expect("default layout is valid")
}

/// Built-in rule base over custom universes.
///
/// Angle terms are spread in row order across the angle universe and distance
/// terms from zero distance ("Z") up to `distance_max`, so the distance terms
/// are stored in reverse table-column order. Rules come out row-major in that
/// term order.
pub fn builtin_with(size: GridSize, layout: &Layout) -> Result<RuleBase, EngineError> {
    let g = grid(size);
    let distance_labels: Vec<&str> = g.columns.iter().rev().copied().collect();

    let angle = LinguisticVariable::uniform(ANGLE, layout.angle_min, layout.angle_max, g.rows)?;
    let distance =
        LinguisticVariable::uniform(DISTANCE, 0.0, layout.distance_max, &distance_labels)?;
    let right = LinguisticVariable::uniform(RIGHT, 0.0, layout.v_max, g.outputs)?;
    let left = LinguisticVariable::uniform(LEFT, 0.0, layout.v_max, g.outputs)?;

    let mut rules = Vec::with_capacity(size.rule_count());
    for (row, a) in g.rows.iter().enumerate() {
        for d in &distance_labels {
            let col = g.columns.iter().position(|c| c == d).unwrap();
            rules.push(Rule::new(a, d, g.right[row][col], g.left[row][col]));
        }
    }
    Ok(RuleBase {
        angle,
        distance,
        right,
        left,
        rules,
    })
}
