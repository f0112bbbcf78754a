//! `fuzzy-nav` command line: run and compare scenarios, validate and export
//! rule files.
//!
//! Exit codes: 0 success (goal reached), 1 usage or configuration error,
//! 2 goal not reached, 3 rule validation failure.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::rulebase::{builtin, parse_rulebase, render, GridSize};
use crate::sim::{
    self, ComparisonRow, ConfigError, Controller, Metrics, Scenario, TrajectorySample,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_REACHED: i32 = 2;
pub const EXIT_INVALID_RULES: i32 = 3;

pub const TRAJECTORY_HEADER: &str = "t,x,y,theta,e_d,e_theta,v_l,v_r";
pub const COMPARISON_HEADER: &str =
    "controller,rule_count,reached,time_to_target,time_angle_aligned,path_length,error";

#[derive(Debug, Parser)]
#[command(
    name = "fuzzy-nav",
    version,
    about = "Fuzzy goal-seeking navigation for a differential-drive robot"
)]
pub struct Cli {
    /// Suppress the human-readable report on standard output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write trajectory.csv and metrics.json.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// 3, 5, 7 or a rules file; overrides the scenario's controller.
        #[arg(long)]
        controller: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the scenario with each built-in controller and tabulate metrics.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and validate a rules file.
    Validate { rules: PathBuf },
    /// Write a built-in rule base in the rules file format.
    ExportRules {
        /// 3, 5 or 7.
        #[arg(long, visible_alias = "controller")]
        size: GridSize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the benchmark scenario file.
    Scenario {
        /// Bearing of the goal from the start heading, degrees.
        #[arg(long, default_value_t = 45.0, allow_negative_numbers = true)]
        bearing: f64,
        #[arg(long, default_value = "3")]
        controller: GridSize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] sim::SimError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Rules { .. }) => EXIT_INVALID_RULES,
            _ => EXIT_USAGE,
        }
    }
}

/// Formats with 9 significant digits, trailing zeros trimmed.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

pub fn trajectory_csv(samples: &[TrajectorySample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in samples {
        let row = [
            s.t,
            s.pose.x,
            s.pose.y,
            s.pose.theta,
            s.errors.e_d,
            s.errors.e_theta,
            s.wheels.v_l,
            s.wheels.v_r,
        ]
        .map(format_sig9)
        .join(",");
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn metrics_json(m: &Metrics) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("metrics serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonEntry {
    pub controller: String,
    pub rule_count: Option<usize>,
    pub reached: bool,
    pub time_to_target: Option<f64>,
    pub time_angle_aligned: Option<f64>,
    pub path_length: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonEntry>,
    /// Whether arrival times rank 3-term < 5-term < 7-term; null when a
    /// built-in did not reach the goal.
    pub fewest_terms_fastest: Option<bool>,
}

impl ComparisonTable {
    pub fn from_rows(rows: &[ComparisonRow]) -> Self {
        let entries = rows
            .iter()
            .map(|r| match &r.outcome {
                Ok(out) => ComparisonEntry {
                    controller: r.controller.clone(),
                    rule_count: Some(out.metrics.rule_count),
                    reached: out.metrics.reached,
                    time_to_target: out.metrics.time_to_target,
                    time_angle_aligned: out.metrics.time_angle_aligned,
                    path_length: Some(out.metrics.path_length),
                    error: None,
                },
                Err(e) => ComparisonEntry {
                    controller: r.controller.clone(),
                    rule_count: None,
                    reached: false,
                    time_to_target: None,
                    time_angle_aligned: None,
                    path_length: None,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        Self {
            rows: entries,
            fewest_terms_fastest: sim::fewest_terms_fastest(rows),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{COMPARISON_HEADER}");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.controller,
                r.rule_count.map(|n| n.to_string()).unwrap_or_default(),
                r.reached,
                opt(r.time_to_target),
                opt(r.time_angle_aligned),
                opt(r.path_length),
                r.error.as_deref().unwrap_or("").replace([',', '\n'], " ")
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>8} {:>12} {:>12} {:>12}",
            "controller", "rules", "reached", "t_target[s]", "t_align[s]", "path[m]"
        );
        let dash =
            |x: Option<f64>, prec: usize| x.map_or("-".to_string(), |v| format!("{v:.prec$}"));
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<12} {:>6} {:>8} {:>12} {:>12} {:>12}",
                r.controller,
                r.rule_count.map_or("-".into(), |n| n.to_string()),
                r.reached,
                dash(r.time_to_target, 1),
                dash(r.time_angle_aligned, 1),
                dash(r.path_length, 2),
            );
            if let Some(e) = &r.error {
                let _ = writeln!(out, "  error: {e}");
            }
        }
        let verdict = match self.fewest_terms_fastest {
            Some(true) => "holds",
            Some(false) => "does not hold",
            None => "undetermined",
        };
        let _ = writeln!(
            out,
            "ordering three < five < seven (time to target): {verdict}"
        );
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub controller: String,
    pub metrics: Metrics,
    pub trajectory_file: PathBuf,
    pub metrics_file: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn cmd_run(
    scenario_path: &Path,
    controller: Option<&str>,
    out_dir: &Path,
) -> Result<(RunReport, i32), CliError> {
    let mut sc = Scenario::load(scenario_path)?;
    if let Some(choice) = controller {
        sc.controller = Controller::resolve(choice, None)?;
    }
    let out = sim::run(&sc)?;
    ensure_dir(out_dir)?;
    let trajectory_file = out_dir.join("trajectory.csv");
    let metrics_file = out_dir.join("metrics.json");
    write_file(&trajectory_file, &trajectory_csv(&out.trajectory))?;
    write_file(&metrics_file, &metrics_json(&out.metrics))?;
    let code = if out.metrics.reached {
        EXIT_OK
    } else {
        EXIT_NOT_REACHED
    };
    Ok((
        RunReport {
            scenario: sc.to_toml(),
            controller: sc.controller.name(),
            metrics: out.metrics,
            trajectory_file,
            metrics_file,
        },
        code,
    ))
}

/// Writes `comparison.csv`, `comparison.json` and one
/// `trajectory_<controller>.csv` per built-in controller.
pub fn cmd_compare(
    scenario_path: &Path,
    out_dir: &Path,
) -> Result<(ComparisonTable, i32), CliError> {
    let sc = Scenario::load(scenario_path)?;
    let controllers: Vec<_> = GridSize::ALL.into_iter().map(Controller::Builtin).collect();
    let rows = sim::compare(&sc, &controllers);
    ensure_dir(out_dir)?;
    for row in &rows {
        if let Ok(out) = &row.outcome {
            let path = out_dir.join(format!("trajectory_{}.csv", row.controller));
            write_file(&path, &trajectory_csv(&out.trajectory))?;
        }
    }
    let table = ComparisonTable::from_rows(&rows);
    write_file(&out_dir.join("comparison.csv"), &table.to_csv())?;
    write_file(&out_dir.join("comparison.json"), &table.to_json())?;
    let code = if table.rows.iter().all(|r| r.reached) {
        EXIT_OK
    } else {
        EXIT_NOT_REACHED
    };
    Ok((table, code))
}

/// Diagnostics for a rules file, one per problem. Empty when valid.
pub fn cmd_validate(rules_path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(rules_path).map_err(|source| CliError::Read {
        path: rules_path.to_path_buf(),
        source,
    })?;
    Ok(match parse_rulebase(&text) {
        Ok(_) => Vec::new(),
        Err(diags) => diags.iter().map(ToString::to_string).collect(),
    })
}

pub fn cmd_export_rules(size: GridSize, out: Option<&Path>) -> Result<String, CliError> {
    let text = render(&builtin(size));
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    Ok(text)
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let quiet = cli.quiet;
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    let mut say = |s: &str| {
        if !quiet {
            let _ = stdout.write_all(s.as_bytes());
        }
    };

    let result = match cli.command {
        Command::Run {
            scenario,
            controller,
            out,
        } => cmd_run(&scenario, controller.as_deref(), &out).map(|(report, code)| {
            say(&format_report(&report));
            code
        }),
        Command::Compare { scenario, out } => cmd_compare(&scenario, &out).map(|(table, code)| {
            say(&table.to_text());
            code
        }),
        Command::Validate { rules } => cmd_validate(&rules).map(|diags| {
            if diags.is_empty() {
                say(&format!("{}: ok\n", rules.display()));
                EXIT_OK
            } else {
                // Diagnostics are the command's output; --quiet does not hide them.
                for d in &diags {
                    println!("{}: {d}", rules.display());
                }
                EXIT_INVALID_RULES
            }
        }),
        Command::ExportRules { size, out } => cmd_export_rules(size, out.as_deref()).map(|text| {
            if out.is_none() {
                print!("{text}");
            }
            EXIT_OK
        }),
        Command::Scenario {
            bearing,
            controller,
            out,
        } => {
            let text = Scenario::benchmark_with_bearing(
                Controller::Builtin(controller),
                bearing.to_radians(),
            )
            .to_toml();
            match out {
                Some(path) => write_file(&path, &text).map(|_| EXIT_OK),
                None => {
                    print!("{text}");
                    Ok(EXIT_OK)
                }
            }
        }
    };

    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn format_report(r: &RunReport) -> String {
    let m = &r.metrics;
    let mut out = String::new();
    let _ = writeln!(out, "scenario:");
    for line in r.scenario.lines() {
        let _ = writeln!(out, "  {line}");
    }
    let _ = writeln!(out, "controller: {} ({} rules)", r.controller, m.rule_count);
    let _ = writeln!(out, "reached: {}", m.reached);
    let _ = writeln!(out, "time_to_target: {}", opt(m.time_to_target));
    let _ = writeln!(out, "time_angle_aligned: {}", opt(m.time_angle_aligned));
    let _ = writeln!(out, "path_length: {}", format_sig9(m.path_length));
    let _ = writeln!(out, "trajectory: {}", r.trajectory_file.display());
    let _ = writeln!(out, "metrics: {}", r.metrics_file.display());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(-0.0), "0");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(0.1), "0.1");
        assert_eq!(format_sig9(0.30000000000000004), "0.3");
        assert_eq!(format_sig9(std::f64::consts::PI), "3.14159265");
        assert_eq!(format_sig9(-24.41), "-24.41");
        assert_eq!(format_sig9(123456789.4), "123456789");
        assert_eq!(format_sig9(1234567894.0), "1.23456789e9");
        assert_eq!(format_sig9(1.5e-7), "1.5e-7");
        assert_eq!(format_sig9(0.000123456789123), "0.000123456789");
        assert_eq!(format_sig9(9.9999999999), "10");
    }

    #[test]
    fn trajectory_header_is_frozen() {
        let csv = trajectory_csv(&[]);
        assert_eq!(csv, "t,x,y,theta,e_d,e_theta,v_l,v_r\n");
    }

    #[test]
    fn metrics_json_uses_null_for_missing_times() {
        let m = Metrics {
            reached: false,
            time_to_target: None,
            time_angle_aligned: Some(0.5),
            path_length: 1.25,
            rule_count: 9,
        };
        let v: serde_json::Value = serde_json::from_str(&metrics_json(&m)).unwrap();
        assert_eq!(v["time_to_target"], serde_json::Value::Null);
        assert_eq!(v["time_angle_aligned"], 0.5);
        assert_eq!(v["rule_count"], 9);
        assert_eq!(v.as_object().unwrap().len(), 5);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["fuzzy-nav", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            main_with_args(["fuzzy-nav", "export-rules", "--size", "4"]),
            EXIT_USAGE
        );
    }
}
