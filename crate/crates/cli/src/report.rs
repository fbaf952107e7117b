//! JSON report and its fixed-format text summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use ymlattice_core::complex4::CELL_ORDERING_VERSION;
use ymlattice_core::solver::TraceEntry;

use crate::config::RunConfig;

/// What a check is expected to show.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// The identity holds: pass iff `defect ≤ tol`.
    Hold,
    /// A counterexample is expected: pass iff `defect > tol`.
    Violate,
    /// Nothing is claimed; the defect is recorded and the check passes.
    Record,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub defect: f64,
    pub tol: f64,
    pub pass: bool,
    pub expectation: Expectation,
}

impl Check {
    pub fn new(name: &str, defect: f64, tol: f64, expectation: Expectation) -> Self {
        let pass = match expectation {
            Expectation::Hold => defect <= tol,
            Expectation::Violate => defect > tol,
            Expectation::Record => true,
        };
        Self {
            name: name.to_string(),
            defect,
            tol,
            pass,
            expectation,
        }
    }

    pub fn hold(name: &str, defect: f64, tol: f64) -> Self {
        Self::new(name, defect, tol, Expectation::Hold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub tool_version: String,
    pub ordering_version: u32,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub scalars: BTreeMap<String, f64>,
    pub trace: Vec<TraceEntry>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            ordering_version: CELL_ORDERING_VERSION,
            config: config.clone(),
            checks: Vec::new(),
            scalars: BTreeMap::new(),
            trace: Vec::new(),
        }
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.insert(name.to_string(), value);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Pretty-printed JSON with a trailing newline. Non-finite values are
    /// written as `null`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    /// Fixed-format summary table.
    pub fn summary(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let sizes = c.sizes.map(|n| n.to_string()).join("x");
        let topology = serde_json::to_value(c.topology).expect("serializable");
        let topology = topology.as_str().unwrap_or("?");
        writeln!(
            out,
            "ymlattice {} {}  {} {}  seed {}",
            self.tool_version, self.command, topology, sizes, c.seed
        )
        .unwrap();
        if !self.checks.is_empty() {
            writeln!(
                out,
                "{:<34} {:>12} {:>10}  {:<8} result",
                "check", "defect", "tol", "expect"
            )
            .unwrap();
            for ch in &self.checks {
                let expect = match ch.expectation {
                    Expectation::Hold => "hold",
                    Expectation::Violate => "violate",
                    Expectation::Record => "record",
                };
                let result = if ch.pass { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "{:<34} {:>12.3e} {:>10.1e}  {:<8} {}",
                    ch.name, ch.defect, ch.tol, expect, result
                )
                .unwrap();
            }
        }
        if !self.scalars.is_empty() {
            writeln!(out, "{:<34} {:>14}", "scalar", "value").unwrap();
            for (k, v) in &self.scalars {
                writeln!(out, "{:<34} {:>14.6e}", k, v).unwrap();
            }
        }
        if let (Some(first), Some(last)) = (self.trace.first(), self.trace.last()) {
            writeln!(
                out,
                "trace: {} iterations, objective {:.6e} -> {:.6e}, grad max {:.3e}",
                last.iter, first.objective, last.objective, last.grad_max
            )
            .unwrap();
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        writeln!(
            out,
            "{} of {} checks passed",
            self.checks.len() - failed,
            self.checks.len()
        )
        .unwrap();
        out
    }
}
