//! Machine-readable run reports and their text rendering.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

use retrodictor_core::ensembles::DensityOperator;
use retrodictor_core::linalg::{HermitianOperator, SquareMatrix};
use retrodictor_core::suites::Check;

use crate::files::matrix_entries;

pub const TOOL: &str = "retrodictor";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    InputError,
    NumericError,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl From<Check> for CheckEntry {
    fn from(c: Check) -> Self {
        Self {
            name: c.name,
            value: c.value,
            tolerance: c.tolerance,
            verdict: if c.passed { Verdict::Pass } else { Verdict::Fail },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub derived: Map<String, Value>,
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            inputs,
            derived: Map::new(),
            checks: Vec::new(),
            seed: None,
            notes: Vec::new(),
            status: Status::Pass,
            error: None,
        }
    }

    pub fn derive(&mut self, key: &str, value: impl Serialize) {
        self.derived
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable value"));
    }

    pub fn check(&mut self, name: &str, value: f64, tolerance: f64) {
        self.checks.push(Check::at_most(name, value, tolerance).into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    /// Sets the status from the checks unless an error was recorded.
    pub fn finalize(mut self) -> Self {
        if self.error.is_none() {
            self.status = if self.all_passed() { Status::Pass } else { Status::Fail };
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} :: {}", self.tool, self.version, self.command);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        if !self.derived.is_empty() {
            let _ = writeln!(out, "\nderived:");
            for (k, v) in &self.derived {
                let _ = writeln!(out, "  {k}: {}", compact(v));
            }
        }
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            let _ = writeln!(out, "\nchecks:");
            for c in &self.checks {
                let mark = match c.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                };
                let _ = writeln!(out, "  {mark}  {:width$}  {:.3e} <= {:e}", c.name, c.value, c.tolerance);
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "\nerror: {e}");
        }
        let status = serde_json::to_value(self.status).expect("status serializes");
        let _ = writeln!(out, "\nstatus: {}", status.as_str().unwrap_or("?"));
        out
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.chars().count() > 160 {
        format!("{}...", s.chars().take(157).collect::<String>())
    } else {
        s
    }
}

pub fn matrix_value(m: &SquareMatrix) -> Value {
    json!(matrix_entries(m))
}

pub fn operator_value(h: &HermitianOperator) -> Value {
    matrix_value(h.matrix())
}

pub fn density_value(d: &DensityOperator) -> Value {
    matrix_value(d.matrix())
}

pub fn vector_value(v: &[num_complex::Complex64]) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}
