//! Serializable run reports.
//!
//! The library's report types stay serde-free; this module mirrors them into
//! plain DTOs.  Everything except `timings_ms` is deterministic for a fixed
//! command line, so re-runs can be diffed field by field.

use std::collections::BTreeMap;

use serde::Serialize;

use fitzkit::gates::{GateCheck, GateReport};
use fitzkit::LemmaReport;

#[derive(Serialize)]
pub struct RunReport {
    /// The subcommand and its significant arguments, echoed back.
    pub command: String,
    /// Grid specs, tolerances, seeds — whatever shaped this run.
    pub config: serde_json::Value,
    /// One row per assertion the command checked.
    pub results: Vec<CheckResult>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    /// Wall-clock stage timings; excluded from the determinism contract.
    pub timings_ms: BTreeMap<String, u128>,
}

impl RunReport {
    pub fn new(command: String, config: serde_json::Value) -> Self {
        Self {
            command,
            config,
            results: Vec::new(),
            outputs: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn all_hold(&self) -> bool {
        self.results.iter().all(|r| r.holds)
    }
}

#[derive(Serialize)]
pub struct CheckResult {
    pub name: String,
    pub holds: bool,
    /// Worst margin where the check is inequality-shaped; `None` when the
    /// margin is not finite or not meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    pub notes: String,
}

impl CheckResult {
    pub fn new(name: &str, holds: bool, margin: Option<f64>, notes: String) -> Self {
        Self {
            name: name.into(),
            holds,
            margin: margin.filter(|m| m.is_finite()),
            witness: None,
            notes,
        }
    }

    pub fn with_witness(mut self, witness: Option<Vec<f64>>) -> Self {
        self.witness = witness;
        self
    }
}

pub fn gate_check_row(name: &str, check: &GateCheck<f64>) -> CheckResult {
    let margin = check.worst_violation.to_f64();
    CheckResult::new(
        name,
        check.holds,
        margin.is_finite().then_some(margin),
        if check.holds {
            "no violation above tolerance".into()
        } else {
            "violated; witness is the offending node".into()
        },
    )
    .with_witness(check.witness.clone())
}

pub fn gate_rows(report: &GateReport<f64>) -> Vec<CheckResult> {
    vec![
        gate_check_row("h-majorizes-pairing", &report.h_ge_pi),
        gate_check_row("transform-majorizes-pairing", &report.jh_ge_pi),
    ]
}

/// Mirror of [`fitzkit::LemmaReport`] for JSON output.
#[derive(Serialize)]
pub struct LemmaReportDoc {
    pub lemma_id: String,
    pub inputs_digest: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    pub notes: String,
}

impl From<&LemmaReport> for LemmaReportDoc {
    fn from(r: &LemmaReport) -> Self {
        Self {
            lemma_id: r.lemma_id.clone(),
            inputs_digest: r.inputs_digest.clone(),
            holds: r.holds,
            worst_margin: r.worst_margin.is_finite().then_some(r.worst_margin),
            witness: r.witness.clone(),
            notes: r.notes.clone(),
        }
    }
}
