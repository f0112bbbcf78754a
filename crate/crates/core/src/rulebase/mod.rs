//! Complete rule grids mapping (angle term, distance term) to a pair of motor
//! speed terms, plus the built-in 3/5/7-term controllers and a line-oriented
//! text format.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::LinguisticVariable;

mod builtin;
mod text;

pub use builtin::{builtin, builtin_with, Layout, BENCHMARK_DISTANCE, DISTANCE_RANGE_FRACTION};
pub use text::{parse_rulebase, render, Diagnostic};

pub const ANGLE: &str = "angle";
pub const DISTANCE: &str = "distance";
pub const RIGHT: &str = "right";
pub const LEFT: &str = "left";

/// Number of terms per input variable of a built-in controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSize {
    Three,
    Five,
    Seven,
}

impl GridSize {
    pub const ALL: [GridSize; 3] = [GridSize::Three, GridSize::Five, GridSize::Seven];

    pub fn terms(self) -> usize {
        match self {
            GridSize::Three => 3,
            GridSize::Five => 5,
            GridSize::Seven => 7,
        }
    }

    pub fn rule_count(self) -> usize {
        self.terms() * self.terms()
    }

    pub fn name(self) -> &'static str {
        match self {
            GridSize::Three => "three",
            GridSize::Five => "five",
            GridSize::Seven => "seven",
        }
    }
}

impl fmt::Display for GridSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown controller size '{0}'; expected one of 3, 5, 7")]
pub struct UnknownGridSize(pub String);

impl FromStr for GridSize {
    type Err = UnknownGridSize;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "3" | "three" => Ok(GridSize::Three),
            "5" | "five" => Ok(GridSize::Five),
            "7" | "seven" => Ok(GridSize::Seven),
            _ => Err(UnknownGridSize(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub angle: String,
    pub distance: String,
    pub right: String,
    pub left: String,
}

impl Rule {
    pub fn new(angle: &str, distance: &str, right: &str, left: &str) -> Self {
        Self {
            angle: angle.into(),
            distance: distance.into(),
            right: right.into(),
            left: left.into(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "if {ANGLE} is {} and {DISTANCE} is {} then {RIGHT} is {}, {LEFT} is {}",
            self.angle, self.distance, self.right, self.left
        )
    }
}

/// The four variables plus the rule grid. Fields are plain data; call
/// [`RuleBase::validate`] before trusting a hand-assembled value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleBase {
    pub angle: LinguisticVariable,
    pub distance: LinguisticVariable,
    pub right: LinguisticVariable,
    pub left: LinguisticVariable,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    InvalidVariable {
        variable: String,
        detail: String,
    },
    UnresolvedAntecedent {
        rule: usize,
        variable: String,
        label: String,
    },
    UnresolvedConsequent {
        rule: usize,
        variable: String,
        label: String,
    },
    DuplicateCell {
        rule: usize,
        angle: String,
        distance: String,
    },
    MissingCell {
        angle: String,
        distance: String,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::InvalidVariable { variable, detail } => {
                write!(f, "variable '{variable}': {detail}")
            }
            Issue::UnresolvedAntecedent {
                rule,
                variable,
                label,
            } => write!(
                f,
                "rule {}: unknown term '{label}' for variable '{variable}'",
                rule + 1
            ),
            Issue::UnresolvedConsequent {
                rule,
                variable,
                label,
            } => write!(
                f,
                "rule {}: unresolved consequent '{label}' for variable '{variable}'",
                rule + 1
            ),
            Issue::DuplicateCell {
                rule,
                angle,
                distance,
            } => write!(f, "rule {}: duplicate cell ({angle}, {distance})", rule + 1),
            Issue::MissingCell { angle, distance } => {
                write!(f, "incomplete grid: ({angle}, {distance}) undefined")
            }
        }
    }
}

impl RuleBase {
    pub fn variables(&self) -> [&LinguisticVariable; 4] {
        [&self.angle, &self.distance, &self.right, &self.left]
    }

    /// Every invariant violation, one issue per violation. Empty iff valid.
    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        for var in self.variables() {
            for detail in var.check() {
                issues.push(Issue::InvalidVariable {
                    variable: var.name.clone(),
                    detail,
                });
            }
        }

        let mut seen: HashMap<(&str, &str), usize> = HashMap::new();
        for (i, rule) in self.rules.iter().enumerate() {
            for (var, label) in [(&self.angle, &rule.angle), (&self.distance, &rule.distance)] {
                if var.term(label).is_none() {
                    issues.push(Issue::UnresolvedAntecedent {
                        rule: i,
                        variable: var.name.clone(),
                        label: label.clone(),
                    });
                }
            }
            for (var, label) in [(&self.right, &rule.right), (&self.left, &rule.left)] {
                if var.term(label).is_none() {
                    issues.push(Issue::UnresolvedConsequent {
                        rule: i,
                        variable: var.name.clone(),
                        label: label.clone(),
                    });
                }
            }
            if seen.insert((&rule.angle, &rule.distance), i).is_some() {
                issues.push(Issue::DuplicateCell {
                    rule: i,
                    angle: rule.angle.clone(),
                    distance: rule.distance.clone(),
                });
            }
        }

        for a in self.angle.labels() {
            for d in self.distance.labels() {
                if !seen.contains_key(&(a, d)) {
                    issues.push(Issue::MissingCell {
                        angle: a.into(),
                        distance: d.into(),
                    });
                }
            }
        }
        issues
    }

    /// The rule for a grid cell, if defined.
    pub fn cell(&self, angle: &str, distance: &str) -> Option<&Rule> {
        self.rules
            .iter()
            .find(|r| r.angle == angle && r.distance == distance)
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Reorders rules row-major over the angle then distance term order.
    /// Rules whose antecedents do not resolve keep their relative order at
    /// the end.
    pub fn sort_rules(&mut self) {
        let key = |r: &Rule| {
            (
                self.angle.index_of(&r.angle).unwrap_or(usize::MAX),
                self.distance.index_of(&r.distance).unwrap_or(usize::MAX),
            )
        };
        let mut keyed: Vec<_> = self.rules.drain(..).map(|r| (key(&r), r)).collect();
        keyed.sort_by_key(|(k, _)| *k);
        self.rules = keyed.into_iter().map(|(_, r)| r).collect();
    }
}
