//! Reports: a human table on stdout, a versioned JSON document and an
//! optional CSV, all with fixed float formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dirac_trace::error::{Error, Result};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Fixed-precision rendering used in every table.
pub fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// `value < tolerance`; NaN never passes.
    pub fn below(suite: &str, name: &str, value: f64, tolerance: f64) -> Check {
        Check {
            suite: suite.into(),
            name: name.into(),
            value: Some(value),
            tolerance: Some(tolerance),
            passed: value < tolerance,
            detail: String::new(),
        }
    }

    pub fn flag(suite: &str, name: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check { suite: suite.into(), name: name.into(), value: None, tolerance: None, passed, detail: detail.into() }
    }

    /// Turns a library error into a failed check naming the contract.
    pub fn from_result<T>(suite: &str, name: &str, r: &Result<T>) -> Check {
        match r {
            Ok(_) => Check::flag(suite, name, true, ""),
            Err(e) => Check::flag(suite, name, false, e.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = detail.into();
        self
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub passed: bool,
    pub summary: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub table: Option<Table>,
    pub data: Value,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            passed: true,
            summary: vec![],
            checks: vec![],
            warnings: vec![],
            table: None,
            data: Value::Null,
            csv: None,
        }
    }

    pub fn add(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.command);
        let w = self.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.summary {
            let _ = writeln!(s, "  {k:<w$}  {v}");
        }
        if let Some(t) = &self.table {
            let widths: Vec<usize> = (0..t.header.len())
                .map(|j| t.rows.iter().map(|r| r[j].len()).chain([t.header[j].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                let mut out = String::from(" ");
                for (c, w) in cells.iter().zip(&widths) {
                    let _ = write!(out, " {c:>w$}");
                }
                out
            };
            let _ = writeln!(s, "{}", line(&t.header));
            for r in &t.rows {
                let _ = writeln!(s, "{}", line(r));
            }
        }
        if !self.checks.is_empty() {
            let wn = self.checks.iter().map(|c| c.suite.len() + c.name.len() + 1).max().unwrap_or(0);
            for c in &self.checks {
                let name = format!("{}/{}", c.suite, c.name);
                let val = c.value.map(sci).unwrap_or_else(|| "-".into());
                let tol = c.tolerance.map(|t| format!("< {t:.1e}")).unwrap_or_default();
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                let _ = write!(s, "  {verdict}  {name:<wn$}  {val:>16}  {tol:<9}");
                if !c.detail.is_empty() {
                    let _ = write!(s, "  {}", c.detail);
                }
                let _ = writeln!(s);
            }
        }
        for w in &self.warnings {
            let _ = writeln!(s, "  warning: {w}");
        }
        if !self.checks.is_empty() {
            let failed = self.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(s, "  {} checks, {failed} failed", self.checks.len());
        }
        s
    }

    /// Writes `<command>.json` and, when present, `<command>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{}.json", self.command)), self.to_json())?;
        if let Some(csv) = &self.csv {
            fs::write(dir.join(format!("{}.csv", self.command)), csv)?;
        }
        Ok(())
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Numerical(format!("report serialisation: {e}")))
}
