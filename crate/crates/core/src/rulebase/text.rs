//! Line-oriented rule-definition format.
//!
//! ```text
//! # comment
//! var <name> range <lo> <hi>
//! term <var> <label> tri <left> <peak> <right>
//! rule if angle is <label> and distance is <label> then right is <label>, left is <label>
//! ```
//!
//! Variable names are fixed to `angle`, `distance`, `right` and `left`.
//! Statements may appear in any order. Terms are sorted by peak and rules
//! are stored row-major over the sorted angle and distance terms, which is
//! also the order [`render`] writes them in.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use super::{Rule, RuleBase, ANGLE, DISTANCE, LEFT, RIGHT};
use crate::engine::{Interval, LinguisticVariable, Term, TriangularMf};

const VARIABLES: [&str; 4] = [ANGLE, DISTANCE, RIGHT, LEFT];

/// A parse or validation problem. `line == 0` marks a whole-file problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }

    fn file(message: impl Into<String>) -> Self {
        Self::at(0, 0, message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "{}:{}: {}", self.line, self.column, self.message)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut col = 0;
    for (byte, ch) in body.char_indices() {
        col += 1;
        if ch.is_whitespace() || ch == ',' {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &body[b..byte],
                    col: c,
                });
            }
            if ch == ',' {
                tokens.push(Token { text: ",", col });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token {
            text: &body[b..],
            col: c,
        });
    }
    tokens
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Cursor<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, expected: &str) -> Result<Token<'a>, Diagnostic> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(*t)
            }
            None => Err(Diagnostic::at(
                self.line,
                self.end_col,
                format!("expected {expected}, found end of line"),
            )),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), Diagnostic> {
        let t = self.next(&format!("'{kw}'"))?;
        if t.text == kw {
            Ok(())
        } else {
            Err(Diagnostic::at(
                self.line,
                t.col,
                format!("expected '{kw}', found '{}'", t.text),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Token<'a>, Diagnostic> {
        let t = self.next(what)?;
        if is_ident(t.text) {
            Ok(t)
        } else {
            Err(Diagnostic::at(
                self.line,
                t.col,
                format!("expected {what}, found '{}'", t.text),
            ))
        }
    }

    fn number(&mut self, what: &str) -> Result<f64, Diagnostic> {
        let t = self.next(what)?;
        match t.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Diagnostic::at(
                self.line,
                t.col,
                format!("expected {what} (finite number), found '{}'", t.text),
            )),
        }
    }

    fn finish(&self) -> Result<(), Diagnostic> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(Diagnostic::at(
                self.line,
                t.col,
                format!("unexpected '{}' after end of statement", t.text),
            )),
        }
    }
}

struct VarDecl {
    line: usize,
    col: usize,
    universe: Interval,
}

struct TermDecl<'a> {
    line: usize,
    var: Token<'a>,
    label: Token<'a>,
    mf: TriangularMf,
}

struct RuleDecl<'a> {
    line: usize,
    labels: [Token<'a>; 4],
}

enum Statement<'a> {
    Var(&'a str, VarDecl),
    Term(TermDecl<'a>),
    Rule(RuleDecl<'a>),
}

fn parse_statement<'a>(cur: &mut Cursor<'a>) -> Result<Statement<'a>, Diagnostic> {
    let line = cur.line;
    let head = cur.next("statement")?;
    let stmt = match head.text {
        "var" => {
            let name = cur.ident("variable name")?;
            cur.keyword("range")?;
            let lo = cur.number("range lower bound")?;
            let hi = cur.number("range upper bound")?;
            Statement::Var(
                name.text,
                VarDecl {
                    line,
                    col: name.col,
                    universe: Interval::new(lo, hi),
                },
            )
        }
        "term" => {
            let var = cur.ident("variable name")?;
            let label = cur.ident("term label")?;
            let tri = cur.next("'tri'")?;
            if tri.text != "tri" {
                return Err(Diagnostic::at(
                    line,
                    tri.col,
                    format!(
                        "unsupported membership shape '{}'; only 'tri' is available",
                        tri.text
                    ),
                ));
            }
            let left = cur.number("left foot")?;
            let peak = cur.number("peak")?;
            let right = cur.number("right foot")?;
            let mf = TriangularMf::new(left, peak, right)
                .map_err(|e| Diagnostic::at(line, tri.col, e.to_string()))?;
            Statement::Term(TermDecl {
                line,
                var,
                label,
                mf,
            })
        }
        "rule" => {
            cur.keyword("if")?;
            cur.keyword(ANGLE)?;
            cur.keyword("is")?;
            let angle = cur.ident("angle term")?;
            cur.keyword("and")?;
            cur.keyword(DISTANCE)?;
            cur.keyword("is")?;
            let distance = cur.ident("distance term")?;
            cur.keyword("then")?;
            cur.keyword(RIGHT)?;
            cur.keyword("is")?;
            let right = cur.ident("right motor term")?;
            cur.keyword(",")?;
            cur.keyword(LEFT)?;
            cur.keyword("is")?;
            let left = cur.ident("left motor term")?;
            Statement::Rule(RuleDecl {
                line,
                labels: [angle, distance, right, left],
            })
        }
        other => {
            return Err(Diagnostic::at(
                line,
                head.col,
                format!("unknown statement '{other}'; expected 'var', 'term' or 'rule'"),
            ))
        }
    };
    cur.finish()?;
    Ok(stmt)
}

/// Parses a rule base. On failure every diagnostic found is returned, sorted
/// by position with whole-file problems last.
pub fn parse_rulebase(text: &str) -> Result<RuleBase, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut vars: HashMap<&str, VarDecl> = HashMap::new();
    let mut terms = Vec::new();
    let mut rules = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            line: idx + 1,
            tokens,
            pos: 0,
            end_col: raw.chars().count() + 1,
        };
        match parse_statement(&mut cur) {
            Ok(Statement::Var(name, decl)) => {
                if !VARIABLES.contains(&name) {
                    diags.push(Diagnostic::at(
                        decl.line,
                        decl.col,
                        format!(
                            "unknown variable '{name}'; expected one of {}",
                            VARIABLES.join(", ")
                        ),
                    ));
                } else if let Some(prev) = vars.get(name) {
                    diags.push(Diagnostic::at(
                        decl.line,
                        decl.col,
                        format!("variable '{name}' already defined on line {}", prev.line),
                    ));
                } else {
                    vars.insert(name, decl);
                }
            }
            Ok(Statement::Term(t)) => terms.push(t),
            Ok(Statement::Rule(r)) => rules.push(r),
            Err(d) => diags.push(d),
        }
    }

    if vars.is_empty() && terms.is_empty() && rules.is_empty() && diags.is_empty() {
        return Err(vec![Diagnostic::file("no variables defined")]);
    }

    // Group terms under their variable.
    let mut grouped: HashMap<&str, Vec<&TermDecl>> = HashMap::new();
    for t in &terms {
        if VARIABLES.contains(&t.var.text) && vars.contains_key(t.var.text) {
            let group = grouped.entry(t.var.text).or_default();
            if let Some(prev) = group.iter().find(|p| p.label.text == t.label.text) {
                diags.push(Diagnostic::at(
                    t.line,
                    t.label.col,
                    format!(
                        "duplicate term '{}' for variable '{}' (first defined on line {})",
                        t.label.text, t.var.text, prev.line
                    ),
                ));
            } else {
                group.push(t);
            }
        } else {
            diags.push(Diagnostic::at(
                t.line,
                t.var.col,
                format!("unknown variable '{}'", t.var.text),
            ));
        }
    }

    let mut built: HashMap<&str, LinguisticVariable> = HashMap::new();
    for name in VARIABLES {
        let Some(decl) = vars.get(name) else {
            diags.push(Diagnostic::file(format!("variable '{name}' not defined")));
            continue;
        };
        let mut members: Vec<&TermDecl> = grouped.remove(name).unwrap_or_default();
        members.sort_by(|a, b| {
            (a.mf.peak, a.mf.left, a.mf.right)
                .partial_cmp(&(b.mf.peak, b.mf.left, b.mf.right))
                .expect("finite breakpoints")
        });
        let var = LinguisticVariable {
            name: name.to_string(),
            universe: decl.universe,
            terms: members
                .iter()
                .map(|t| Term::new(t.label.text, t.mf))
                .collect(),
        };
        for problem in var.check() {
            diags.push(Diagnostic::at(
                decl.line,
                decl.col,
                format!("variable '{name}': {problem}"),
            ));
        }
        built.insert(name, var);
    }

    let mut cells: HashMap<(&str, &str), usize> = HashMap::new();
    let mut parsed_rules = Vec::with_capacity(rules.len());
    for r in &rules {
        let mut resolved = true;
        for (var, tok) in VARIABLES.iter().zip(&r.labels) {
            if let Some(v) = built.get(var) {
                if v.term(tok.text).is_none() {
                    resolved = false;
                    diags.push(Diagnostic::at(
                        r.line,
                        tok.col,
                        format!("unknown term '{}' for variable '{var}'", tok.text),
                    ));
                }
            }
        }
        let [a, d, right, left] = r.labels;
        if let Some(first) = cells.get(&(a.text, d.text)) {
            diags.push(Diagnostic::at(
                r.line,
                a.col,
                format!(
                    "duplicate rule cell ({}, {}) (first defined on line {first})",
                    a.text, d.text
                ),
            ));
            continue;
        }
        cells.insert((a.text, d.text), r.line);
        if resolved {
            parsed_rules.push(Rule::new(a.text, d.text, right.text, left.text));
        }
    }

    if let (Some(angle), Some(distance)) = (built.get(ANGLE), built.get(DISTANCE)) {
        for a in angle.labels() {
            for d in distance.labels() {
                if !cells.contains_key(&(a, d)) {
                    diags.push(Diagnostic::file(format!(
                        "incomplete grid: ({a}, {d}) undefined"
                    )));
                }
            }
        }
    }

    if !diags.is_empty() {
        diags.sort_by_key(|d| (d.line == 0, d.line, d.column));
        return Err(diags);
    }

    let mut take = |name| built.remove(name).expect("all variables built");
    let mut rb = RuleBase {
        angle: take(ANGLE),
        distance: take(DISTANCE),
        right: take(RIGHT),
        left: take(LEFT),
        rules: parsed_rules,
    };
    rb.sort_rules();
    debug_assert!(rb.validate().is_empty());
    Ok(rb)
}

/// Canonical text for a rule base: variables in fixed order, terms sorted by
/// peak, rules row-major over the sorted terms.
pub fn render(rb: &RuleBase) -> String {
    let mut rb = rb.clone();
    for var in [&mut rb.angle, &mut rb.distance, &mut rb.right, &mut rb.left] {
        var.terms.sort_by(|a, b| {
            (a.mf.peak, a.mf.left, a.mf.right)
                .partial_cmp(&(b.mf.peak, b.mf.left, b.mf.right))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
    rb.sort_rules();

    let mut out = String::new();
    let _ = writeln!(
        out,
        "# fuzzy-nav rule base: {} angle terms x {} distance terms, {} rules",
        rb.angle.terms.len(),
        rb.distance.terms.len(),
        rb.rules.len()
    );
    for var in rb.variables() {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "var {} range {} {}",
            var.name, var.universe.lo, var.universe.hi
        );
        for t in &var.terms {
            let _ = writeln!(out, "term {} {} {}", var.name, t.label, t.mf);
        }
    }
    let _ = writeln!(out);
    for rule in &rb.rules {
        let _ = writeln!(out, "rule {rule}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rulebase::{builtin, GridSize};

    #[test]
    fn builtins_round_trip() {
        for size in GridSize::ALL {
            let rb = builtin(size);
            let text = render(&rb);
            let back = parse_rulebase(&text).unwrap();
            assert_eq!(back, rb, "{size}");
            assert_eq!(
                text.lines().filter(|l| l.starts_with("rule ")).count(),
                size.rule_count()
            );
        }
    }

    #[test]
    fn empty_file() {
        let errs = parse_rulebase("").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].to_string(), "no variables defined");
        let errs = parse_rulebase("# only a comment\n\n").unwrap_err();
        assert_eq!(errs[0].message, "no variables defined");
    }

    #[test]
    fn missing_cell() {
        let text = render(&builtin(GridSize::Three));
        let text: String = text
            .lines()
            .filter(|l| !l.contains("angle is P and distance is M "))
            .map(|l| format!("{l}\n"))
            .collect();
        let errs = parse_rulebase(&text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].to_string(), "incomplete grid: (P, M) undefined");
    }

    #[test]
    fn unknown_term_names_term_and_line() {
        let text = render(&builtin(GridSize::Three));
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let idx = lines
            .iter()
            .position(|l| l.starts_with("rule if angle is Z and distance is Z"))
            .unwrap();
        lines[idx] = lines[idx].replace("angle is Z", "angle is XX");
        let errs = parse_rulebase(&lines.join("\n")).unwrap_err();
        let unknown: Vec<_> = errs.iter().filter(|d| d.message.contains("'XX'")).collect();
        assert_eq!(unknown.len(), 1);
        assert_eq!(unknown[0].line, idx + 1);
        assert_eq!(unknown[0].column, 18);
        // The (Z, Z) cell is now missing as well.
        assert!(errs
            .iter()
            .any(|d| d.message == "incomplete grid: (Z, Z) undefined"));
    }

    #[test]
    fn duplicate_cell() {
        let mut text = render(&builtin(GridSize::Three));
        text.push_str("rule if angle is Z and distance is Z then right is F, left is F\n");
        let errs = parse_rulebase(&text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.starts_with("duplicate rule cell (Z, Z)"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let src = "var angle range 0\nvar speed range 0 1\nterm angle A tri 0 x 1\nfrobnicate\n";
        let errs = parse_rulebase(src).unwrap_err();
        let positioned: Vec<_> = errs.iter().filter(|d| d.line > 0).collect();
        assert_eq!(positioned.len(), 4, "{errs:?}");
        assert_eq!((positioned[0].line, positioned[0].column), (1, 18));
        assert!(positioned[1].message.contains("unknown variable 'speed'"));
        assert_eq!((positioned[2].line, positioned[2].column), (3, 20));
        assert!(positioned[3]
            .message
            .contains("unknown statement 'frobnicate'"));
    }

    #[test]
    fn tokenizer_splits_commas() {
        let toks: Vec<_> = tokenize("right is F,left is S # trailing")
            .iter()
            .map(|t| (t.text, t.col))
            .collect();
        assert_eq!(
            toks,
            [
                ("right", 1),
                ("is", 7),
                ("F", 10),
                (",", 11),
                ("left", 12),
                ("is", 17),
                ("S", 20)
            ]
        );
    }

    #[test]
    fn statements_in_any_order() {
        let src = "\
rule if angle is N and distance is Z then right is S, left is S
rule if angle is P and distance is Z then right is F, left is S
rule if angle is P and distance is F then right is F, left is S
rule if angle is N and distance is F then right is S, left is F
term angle P tri -1 1 1
term angle N tri -1 -1 1
term distance F tri 0 1 1
term distance Z tri 0 0 1
term right S tri 0 0 1
term right F tri 0 1 1
term left S tri 0 0 1
term left F tri 0 1 1
var angle range -1 1
var distance range 0 1
var right range 0 1
var left range 0 1
";
        let rb = parse_rulebase(src).unwrap();
        assert_eq!(rb.angle.labels().collect::<Vec<_>>(), ["N", "P"]);
        assert_eq!(rb.rules[0].angle, "N");
        assert_eq!(rb.distance.labels().collect::<Vec<_>>(), ["Z", "F"]);
        assert_eq!(rb.rules[1].distance, "F");
        assert_eq!(rb.rules[2].right, "F");
    }
}
