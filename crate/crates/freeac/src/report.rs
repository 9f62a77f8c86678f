//! Machine-readable verification reports.
//!
//! Reports are schema-stable JSON: a sorted list of named checks, each with its
//! max error, tolerance, safe degree and runtime, plus a global pass flag and a
//! configuration echo. Floats are emitted with 17 significant digits so replays
//! reproduce them exactly.

use std::time::Instant;

use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub safe_degree: Option<usize>,
    pub runtime_ms: f64,
    pub pass: bool,
}

impl Check {
    pub fn status(&self) -> &'static str {
        if self.pass {
            "pass"
        } else {
            "fail"
        }
    }
}

/// Timer helper: build a check from a named measurement against a tolerance.
pub struct CheckTimer {
    name: String,
    start: Instant,
    safe_degree: Option<usize>,
}

impl CheckTimer {
    pub fn start(name: &str) -> CheckTimer {
        CheckTimer { name: name.to_string(), start: Instant::now(), safe_degree: None }
    }

    pub fn safe_degree(mut self, deg: usize) -> CheckTimer {
        self.safe_degree = Some(deg);
        self
    }

    pub fn finish(self, max_error: f64, tolerance: f64) -> Check {
        Check {
            name: self.name,
            max_error,
            tolerance,
            safe_degree: self.safe_degree,
            runtime_ms: self.start.elapsed().as_secs_f64() * 1e3,
            pass: max_error <= tolerance,
        }
    }

    /// For checks that assert a lower bound (e.g. strict positivity).
    pub fn finish_at_least(self, value: f64, threshold: f64) -> Check {
        Check {
            name: self.name,
            max_error: value,
            tolerance: threshold,
            safe_degree: self.safe_degree,
            runtime_ms: self.start.elapsed().as_secs_f64() * 1e3,
            pass: value >= threshold,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub tool_version: String,
    pub suite: String,
    pub seed: Option<u64>,
    pub trunc: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: &str, seed: Option<u64>, trunc: usize, mut checks: Vec<Check>) -> Report {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            suite: suite.to_string(),
            seed,
            trunc,
            checks,
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Serialize with floats at 17 significant digits.
    pub fn to_json_string(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"tool_version\": {},\n", quote(&self.tool_version)));
        out.push_str(&format!("  \"suite\": {},\n", quote(&self.suite)));
        match self.seed {
            Some(s) => out.push_str(&format!("  \"seed\": {s},\n")),
            None => out.push_str("  \"seed\": null,\n"),
        }
        out.push_str(&format!("  \"N\": {},\n", self.trunc));
        out.push_str(&format!("  \"pass\": {},\n", self.pass()));
        out.push_str("  \"checks\": [\n");
        for (k, c) in self.checks.iter().enumerate() {
            out.push_str("    {");
            out.push_str(&format!("\"check\": {}, ", quote(&c.name)));
            out.push_str(&format!("\"status\": {}, ", quote(c.status())));
            out.push_str(&format!("\"max_error\": {}, ", fmt_f64(c.max_error)));
            out.push_str(&format!("\"tolerance\": {}, ", fmt_f64(c.tolerance)));
            match c.safe_degree {
                Some(d) => out.push_str(&format!("\"safe_degree\": {d}, ")),
                None => out.push_str("\"safe_degree\": null, "),
            }
            out.push_str(&format!("\"runtime_ms\": {}", fmt_f64(c.runtime_ms)));
            out.push_str(if k + 1 == self.checks.len() { "}\n" } else { "},\n" });
        }
        out.push_str("  ]\n}\n");
        out
    }

    /// One line per check, for terminal output.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:4} {:44} max_error {:>12.5e}  tol {:>9.1e}{}\n",
                c.status().to_uppercase(),
                c.name,
                c.max_error,
                c.tolerance,
                c.safe_degree
                    .map(|d| format!("  safe_deg {d}"))
                    .unwrap_or_default(),
            ));
        }
        out.push_str(&format!(
            "{}: {} of {} checks passed\n",
            if self.pass() { "PASS" } else { "FAIL" },
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        ));
        out
    }
}

/// 17 significant digits round-trips every f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        // keep integral values readable
        format!("{:.1}", x)
    } else {
        format!("{:.16e}", x)
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("string is serializable")
}

/// Echo of the tolerance configuration for the report header (JSON object).
pub fn tolerances_json(t: &Tolerances) -> serde_json::Value {
    serde_json::to_value(t).expect("serializable")
}
