use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// 17 significant digits, enough to round-trip an f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A named pass/fail check with its measured value and limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// How `value` must relate to `limit`.
    pub relation: String,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, relation: "<=".into(), passed: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, relation: ">=".into(), passed: value >= limit }
    }

    /// A boolean property; value 1 when it holds.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check { name: name.into(), value: if ok { 1.0 } else { 0.0 }, limit: 1.0, relation: "==".into(), passed: ok }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let mut c = Check::at_least(name, value, lo);
        c.relation = format!("in [{lo}, {hi}]");
        c.limit = hi;
        c.passed = value >= lo && value <= hi;
        c
    }
}

/// What a mode hands back: checks, mode-specific details for report.json,
/// and tables to write as CSV.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub details: serde_json::Map<String, serde_json::Value>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn detail<T: Serialize>(&mut self, key: &str, value: &T) -> Result<(), CliError> {
        self.details.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(file: impl Into<String>, header: &[&str]) -> Self {
        Table { file: file.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{}", fmt17(*v));
            }
            s.push('\n');
        }
        s
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// report.json, summary.txt and every table of the outcome under `dir`.
pub fn write_outcome(
    dir: &Path,
    mode: &str,
    seed: u64,
    config: &serde_json::Value,
    outcome: &Outcome,
) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for t in &outcome.tables {
        let p = dir.join(&t.file);
        write_file(&p, &t.to_csv())?;
        written.push(p);
    }
    // Artifacts live in the output directory, so its path is not recorded;
    // reports from identical configs then match byte for byte.
    let mut config = config.clone();
    if let Some(m) = config.as_object_mut() {
        m.remove("output_dir");
    }
    let report = serde_json::json!({
        "mode": mode,
        "seed": seed,
        "all_passed": outcome.passed(),
        "checks": outcome.checks,
        "details": outcome.details,
        "files": outcome.tables.iter().map(|t| t.file.clone()).collect::<Vec<_>>(),
        "config": config,
    });
    let p = dir.join("report.json");
    write_file(&p, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    written.push(p);
    let p = dir.join("summary.txt");
    write_file(&p, &summary(mode, outcome))?;
    written.push(p);
    Ok(written)
}

pub fn summary(mode: &str, outcome: &Outcome) -> String {
    let mut s = format!("mode: {mode}\n");
    for c in &outcome.checks {
        let _ = writeln!(
            s,
            "{} {}: {} {} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            fmt17(c.value),
            c.relation,
            if c.relation.starts_with("in") { String::new() } else { fmt17(c.limit) }
        );
    }
    let _ = writeln!(s, "{}", if outcome.passed() { "all checks passed" } else { "some checks FAILED" });
    s
}
