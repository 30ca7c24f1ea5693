//! Verification suites: the flat-interface Fresnel oracle, Green's function
//! identities and bounds, jump relations, operator oracles, convergence
//! studies, and the point-source singularity probes.
//!
//! Every suite returns a [`SuiteReport`]: a flat list of named checks with
//! the measured value, the tolerance it was held to, and evidence tables
//! that the command-line front end writes as CSV.

use serde::{Deserialize, Serialize};

mod fem;
mod fresnel;
mod greens;
mod layers;
mod probe;

pub use fem::{h1_inner, h1_norm, l2_norm, seminorm_exact, D0Mesh};
pub use fresnel::*;
pub use greens::{greens_suite, specfun_suite};
pub use layers::{convergence_suite, jumps_suite, operator_suite, window_nesting, JumpOptions};
pub use probe::{
    hypersingular_probe, inverse_discrimination_demo, singularity_probe, InverseOptions, InverseReport, ProbeMesh,
    ProbeOptions, ProbeReport,
};

/// One pass/fail measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `"<="` or `">="`
    pub relation: String,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance` (NaN fails).
    pub fn le(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, relation: "<=".into(), pass: value <= tolerance }
    }

    /// Passes when `value ≥ tolerance` (NaN fails).
    pub fn ge(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, relation: ">=".into(), pass: value >= tolerance }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, tolerance: 1.0, relation: ">=".into(), pass: ok }
    }
}

/// Evidence table destined for a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        Self { suite: suite.into(), checks: vec![], tables: vec![] }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: SuiteReport) {
        self.checks.extend(other.checks);
        self.tables.extend(other.tables);
    }
}

/// Fit `C = slack · max(calibration ratios)` and report the worst
/// validation ratio relative to `C` (the bound holds when it is `≤ 1`).
pub(crate) fn fitted_bound(name: &str, calibration: &[f64], validation: &[f64], slack: f64) -> (Check, f64) {
    let c = slack * calibration.iter().cloned().fold(0.0, f64::max);
    let worst = validation.iter().cloned().fold(0.0, f64::max);
    let value = if c > 0.0 { worst / c } else { f64::INFINITY };
    (Check::le(name, value, 1.0), c)
}

/// Slack applied to empirically fitted constants.
pub const FIT_SLACK: f64 = 1.1;
