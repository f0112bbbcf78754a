//! Two-input, two-output Mamdani inference over triangular fuzzy sets.
//!
//! The pipeline is fuzzify → fire (min-AND) → aggregate (max of min-clipped
//! consequents) → centroid. Every stage is a pure function of immutable data.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rulebase::{Issue, RuleBase};

/// Area below which an aggregated output is treated as empty.
pub const ZERO_AREA_TOLERANCE: f64 = 1e-12;

/// Default number of uniform samples for trapezoidal centroid quadrature.
pub const DEFAULT_CENTROID_SAMPLES: usize = 1001;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid triangle ({left}, {peak}, {right}): {reason}")]
    InvalidMf {
        left: f64,
        peak: f64,
        right: f64,
        reason: &'static str,
    },
    #[error("invalid variable '{name}': {reason}")]
    InvalidVariable { name: String, reason: String },
    #[error("unknown label '{label}' for variable '{variable}'")]
    UnknownLabel { variable: String, label: String },
    #[error("invalid rule base: {}", join_issues(.0))]
    InvalidRuleBase(Vec<Issue>),
}

fn join_issues(issues: &[Issue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Triangular membership function `(left, peak, right)`.
///
/// `left == peak` encodes a left shoulder (membership 1 for every `x <= peak`),
/// `peak == right` a right shoulder (membership 1 for every `x >= peak`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangularMf {
    pub left: f64,
    pub peak: f64,
    pub right: f64,
}

impl TriangularMf {
    pub fn new(left: f64, peak: f64, right: f64) -> Result<Self, EngineError> {
        let mf = Self { left, peak, right };
        match mf.defect() {
            Some(reason) => Err(EngineError::InvalidMf {
                left,
                peak,
                right,
                reason,
            }),
            None => Ok(mf),
        }
    }

    fn defect(&self) -> Option<&'static str> {
        if !(self.left.is_finite() && self.peak.is_finite() && self.right.is_finite()) {
            Some("breakpoints must be finite")
        } else if !(self.left <= self.peak && self.peak <= self.right) {
            Some("expected left <= peak <= right")
        } else if self.right - self.left <= 0.0 {
            Some("support must be non-empty")
        } else {
            None
        }
    }

    pub fn is_left_shoulder(&self) -> bool {
        self.left == self.peak
    }

    pub fn is_right_shoulder(&self) -> bool {
        self.peak == self.right
    }

    /// Membership degree of `x`. Total: NaN maps to 0.
    pub fn eval(&self, x: f64) -> f64 {
        if x.is_nan() {
            return 0.0;
        }
        if self.is_left_shoulder() && x <= self.peak {
            return 1.0;
        }
        if self.is_right_shoulder() && x >= self.peak {
            return 1.0;
        }
        if x <= self.left || x >= self.right {
            0.0
        } else if x <= self.peak {
            (x - self.left) / (self.peak - self.left)
        } else {
            (self.right - x) / (self.right - self.peak)
        }
    }

    /// Open interval on which the membership is strictly positive.
    fn positive_support(&self) -> (f64, f64) {
        let lo = if self.is_left_shoulder() {
            f64::NEG_INFINITY
        } else {
            self.left
        };
        let hi = if self.is_right_shoulder() {
            f64::INFINITY
        } else {
            self.right
        };
        (lo, hi)
    }
}

/// Free-function form of [`TriangularMf::eval`].
pub fn mf_eval(mf: &TriangularMf, x: f64) -> f64 {
    mf.eval(x)
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub mf: TriangularMf,
}

impl Term {
    pub fn new(label: impl Into<String>, mf: TriangularMf) -> Self {
        Self {
            label: label.into(),
            mf,
        }
    }
}

/// A named quantity partitioned into labelled triangular fuzzy sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticVariable {
    pub name: String,
    pub universe: Interval,
    pub terms: Vec<Term>,
}

impl LinguisticVariable {
    /// Builds a variable and checks every invariant.
    pub fn new(
        name: impl Into<String>,
        universe: Interval,
        terms: Vec<Term>,
    ) -> Result<Self, EngineError> {
        let var = Self {
            name: name.into(),
            universe,
            terms,
        };
        match var.check().into_iter().next() {
            Some(reason) => Err(EngineError::InvalidVariable {
                name: var.name,
                reason,
            }),
            None => Ok(var),
        }
    }

    /// Evenly spaced peaks from `lo` to `hi` with 50% overlap; each triangle's
    /// feet sit on the neighbouring peaks and the two edge terms are shoulders.
    pub fn uniform(
        name: impl Into<String>,
        lo: f64,
        hi: f64,
        labels: &[&str],
    ) -> Result<Self, EngineError> {
        let name = name.into();
        if labels.len() < 2 {
            return Err(EngineError::InvalidVariable {
                name,
                reason: "a uniform partition needs at least two terms".into(),
            });
        }
        let n = labels.len();
        let span = (n - 1) as f64;
        // Weighted form keeps peaks of a symmetric universe exactly mirrored.
        let peak = |i: usize| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (lo * (span - i as f64) + hi * i as f64) / span,
        };
        let terms = labels
            .iter()
            .enumerate()
            .map(|(i, label)| {
                let p = peak(i);
                let left = if i == 0 { p } else { peak(i - 1) };
                let right = if i == n - 1 { p } else { peak(i + 1) };
                Term::new(
                    *label,
                    TriangularMf {
                        left,
                        peak: p,
                        right,
                    },
                )
            })
            .collect();
        Self::new(name, Interval::new(lo, hi), terms)
    }

    /// All invariant violations, as human-readable reasons. Empty when valid.
    pub fn check(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let Interval { lo, hi } = self.universe;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            issues.push(format!("universe [{lo}, {hi}] must satisfy lo < hi"));
            return issues;
        }
        if self.terms.is_empty() {
            issues.push("no terms defined".into());
            return issues;
        }
        for (i, term) in self.terms.iter().enumerate() {
            if let Some(reason) = term.mf.defect() {
                issues.push(format!("term '{}': {reason}", term.label));
                continue;
            }
            if term.mf.left < lo || term.mf.right > hi {
                issues.push(format!(
                    "term '{}' support [{}, {}] leaves universe [{lo}, {hi}]",
                    term.label, term.mf.left, term.mf.right
                ));
            }
            if self.terms[..i].iter().any(|t| t.label == term.label) {
                issues.push(format!("duplicate term label '{}'", term.label));
            }
        }
        if issues.is_empty() {
            if let Some(gap) = self.coverage_gap() {
                issues.push(format!("no term covers x = {gap}"));
            }
        }
        issues
    }

    /// First point of the universe where every term has zero membership.
    fn coverage_gap(&self) -> Option<f64> {
        let supports: Vec<(f64, f64)> =
            self.terms.iter().map(|t| t.mf.positive_support()).collect();
        let mut reach = self.universe.lo;
        while reach <= self.universe.hi {
            let next = supports
                .iter()
                .filter(|(a, b)| *a < reach && *b > reach)
                .map(|(_, b)| *b)
                .fold(f64::NEG_INFINITY, f64::max);
            if next == f64::NEG_INFINITY {
                return Some(reach);
            }
            reach = next;
        }
        None
    }

    pub fn term(&self, label: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.label == label)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|t| t.label.as_str())
    }

    /// Degree of every term at `x` (clamped to the universe), in term order.
    pub fn fuzzify(&self, x: f64) -> Vec<(&str, f64)> {
        let x = self.universe.clamp(x);
        self.terms
            .iter()
            .map(|t| (t.label.as_str(), t.mf.eval(x)))
            .collect()
    }

    pub fn degree(&self, label: &str, x: f64) -> Option<f64> {
        self.term(label).map(|t| t.mf.eval(self.universe.clamp(x)))
    }
}

/// Free-function form of [`LinguisticVariable::fuzzify`].
pub fn fuzzify(var: &LinguisticVariable, x: f64) -> Vec<(&str, f64)> {
    var.fuzzify(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiredConsequent {
    pub label: String,
    pub strength: f64,
}

/// Fired consequents for both motors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Firing {
    pub right: Vec<FiredConsequent>,
    pub left: Vec<FiredConsequent>,
}

/// Fires every rule with min-AND over its two antecedents. Zero-strength
/// rules are omitted, so every returned strength lies in (0, 1].
///
/// Rules whose antecedent labels do not resolve never fire.
pub fn fire_rules(rb: &RuleBase, e_theta: f64, e_d: f64) -> Firing {
    let angle = rb.angle.fuzzify(e_theta);
    let distance = rb.distance.fuzzify(e_d);
    let lookup = |degrees: &[(&str, f64)], label: &str| {
        degrees
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, d)| *d)
            .unwrap_or(0.0)
    };
    let mut firing = Firing::default();
    for rule in &rb.rules {
        let strength = lookup(&angle, &rule.angle).min(lookup(&distance, &rule.distance));
        if strength > 0.0 {
            firing.right.push(FiredConsequent {
                label: rule.right.clone(),
                strength,
            });
            firing.left.push(FiredConsequent {
                label: rule.left.clone(),
                strength,
            });
        }
    }
    firing
}

/// Max-of-clipped aggregation of fired consequents over an output universe.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedOutput {
    pub universe: Interval,
    /// `(membership function, clip height)`, one entry per distinct label.
    pub clipped: Vec<(TriangularMf, f64)>,
}

impl AggregatedOutput {
    pub fn empty(universe: Interval) -> Self {
        Self {
            universe,
            clipped: Vec::new(),
        }
    }

    pub fn from_clipped(universe: Interval, clipped: Vec<(TriangularMf, f64)>) -> Self {
        Self { universe, clipped }
    }

    /// μ(x) = max over entries of min(height, mf(x)).
    pub fn membership(&self, x: f64) -> f64 {
        self.clipped
            .iter()
            .map(|(mf, h)| h.min(mf.eval(x)))
            .fold(0.0, f64::max)
    }

    pub fn max_height(&self) -> f64 {
        self.clipped.iter().map(|(_, h)| *h).fold(0.0, f64::max)
    }

    /// Every point inside the universe where μ may change slope.
    fn breakpoints(&self) -> Vec<f64> {
        let Interval { lo, hi } = self.universe;
        let mut xs = vec![lo, hi];
        for (mf, h) in &self.clipped {
            xs.extend([mf.left, mf.peak, mf.right]);
            if !mf.is_left_shoulder() {
                xs.push(mf.left + h * (mf.peak - mf.left));
            }
            if !mf.is_right_shoulder() {
                xs.push(mf.right - h * (mf.right - mf.peak));
            }
        }
        xs.retain(|x| (lo..=hi).contains(x));
        xs.sort_by(f64::total_cmp);
        xs.dedup();

        // Crossings between two clipped sets inside a segment.
        let mut crossings = Vec::new();
        for w in xs.windows(2) {
            let (a, b) = (w[0], w[1]);
            for (i, (mi, hi_)) in self.clipped.iter().enumerate() {
                for (mj, hj) in &self.clipped[i + 1..] {
                    let da = hi_.min(mi.eval(a)) - hj.min(mj.eval(a));
                    let db = hi_.min(mi.eval(b)) - hj.min(mj.eval(b));
                    if da * db < 0.0 {
                        crossings.push(a + (b - a) * da / (da - db));
                    }
                }
            }
        }
        xs.extend(crossings);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }
}

/// Builds the aggregated curve for one output variable. Repeated labels
/// combine by the max of their strengths.
pub fn aggregate(
    var: &LinguisticVariable,
    fired: &[FiredConsequent],
) -> Result<AggregatedOutput, EngineError> {
    let mut heights: Vec<Option<f64>> = vec![None; var.terms.len()];
    for f in fired {
        let idx = var
            .index_of(&f.label)
            .ok_or_else(|| EngineError::UnknownLabel {
                variable: var.name.clone(),
                label: f.label.clone(),
            })?;
        let s = f.strength.clamp(0.0, 1.0);
        heights[idx] = Some(heights[idx].map_or(s, |h: f64| h.max(s)));
    }
    let clipped = var
        .terms
        .iter()
        .zip(heights)
        .filter_map(|(t, h)| h.map(|h| (t.mf, h)))
        .collect();
    Ok(AggregatedOutput::from_clipped(var.universe, clipped))
}

/// How the centroid integrals are evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// Trapezoidal rule on a uniform grid of `samples` points.
    Uniform { samples: usize },
    /// Closed-form integration over the exact breakpoints of the
    /// piecewise-linear curve.
    #[default]
    Exact,
}

/// A crisp output and whether it came from an empty aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defuzzified {
    pub value: f64,
    pub zero_area: bool,
}

pub fn defuzz_centroid(agg: &AggregatedOutput) -> Defuzzified {
    defuzz_centroid_with(agg, Quadrature::default())
}

/// Centre of mass of the aggregated curve, clamped to the universe. An area
/// below [`ZERO_AREA_TOLERANCE`] yields the universe midpoint with
/// `zero_area` set.
pub fn defuzz_centroid_with(agg: &AggregatedOutput, quadrature: Quadrature) -> Defuzzified {
    let (area, moment) = match quadrature {
        Quadrature::Uniform { samples } => uniform_moments(agg, samples.max(2)),
        Quadrature::Exact => exact_moments(agg),
    };
    if area.is_nan() || area < ZERO_AREA_TOLERANCE {
        return Defuzzified {
            value: agg.universe.midpoint(),
            zero_area: true,
        };
    }
    Defuzzified {
        value: agg.universe.clamp(moment / area),
        zero_area: false,
    }
}

fn uniform_moments(agg: &AggregatedOutput, samples: usize) -> (f64, f64) {
    let Interval { lo, hi } = agg.universe;
    let h = (hi - lo) / (samples - 1) as f64;
    let (mut area, mut moment) = (0.0, 0.0);
    for i in 0..samples {
        let x = if i == samples - 1 {
            hi
        } else {
            lo + h * i as f64
        };
        let w = if i == 0 || i == samples - 1 { 0.5 } else { 1.0 };
        let mu = agg.membership(x);
        area += w * mu;
        moment += w * x * mu;
    }
    (area * h, moment * h)
}

fn exact_moments(agg: &AggregatedOutput) -> (f64, f64) {
    let xs = agg.breakpoints();
    let (mut area, mut moment) = (0.0, 0.0);
    let mut prev: Option<(f64, f64)> = None;
    for &x in &xs {
        let mu = agg.membership(x);
        if let Some((a, ma)) = prev {
            let w = x - a;
            area += 0.5 * w * (ma + mu);
            moment += w / 6.0 * (a * (2.0 * ma + mu) + x * (ma + 2.0 * mu));
        }
        prev = Some((x, mu));
    }
    (area, moment)
}

/// Crisp wheel speeds plus per-output zero-area flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inference {
    pub right: Defuzzified,
    pub left: Defuzzified,
}

impl Inference {
    pub fn v_r(&self) -> f64 {
        self.right.value
    }

    pub fn v_l(&self) -> f64 {
        self.left.value
    }
}

/// A validated rule base paired with its defuzzification settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Fis {
    rulebase: RuleBase,
    quadrature: Quadrature,
}

impl Fis {
    pub fn new(rulebase: RuleBase) -> Result<Self, EngineError> {
        let issues = rulebase.validate();
        if !issues.is_empty() {
            return Err(EngineError::InvalidRuleBase(issues));
        }
        Ok(Self {
            rulebase,
            quadrature: Quadrature::default(),
        })
    }

    pub fn with_quadrature(mut self, quadrature: Quadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn rulebase(&self) -> &RuleBase {
        &self.rulebase
    }

    pub fn quadrature(&self) -> Quadrature {
        self.quadrature
    }

    pub fn infer(&self, e_theta: f64, e_d: f64) -> Inference {
        let rb = &self.rulebase;
        let firing = fire_rules(rb, e_theta, e_d);
        // Labels were resolved by validation in `new`.
        let right = aggregate(&rb.right, &firing.right).expect("validated rule base");
        let left = aggregate(&rb.left, &firing.left).expect("validated rule base");
        Inference {
            right: defuzz_centroid_with(&right, self.quadrature),
            left: defuzz_centroid_with(&left, self.quadrature),
        }
    }
}

/// One-shot inference on a rule base that may not have been validated.
pub fn infer(rb: &RuleBase, e_theta: f64, e_d: f64) -> Result<Inference, EngineError> {
    let firing = fire_rules(rb, e_theta, e_d);
    let right = aggregate(&rb.right, &firing.right)?;
    let left = aggregate(&rb.left, &firing.left)?;
    Ok(Inference {
        right: defuzz_centroid(&right),
        left: defuzz_centroid(&left),
    })
}

impl fmt::Display for TriangularMf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tri {} {} {}", self.left, self.peak, self.right)
    }
}
