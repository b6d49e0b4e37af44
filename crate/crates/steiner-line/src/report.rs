//! Machine-readable summary of a solve run, printed by the CLI.
//!
//! Wall-clock timings are kept out of the serialized form so identical
//! inputs always serialize to identical bytes; they go to stderr instead.

use std::time::Duration;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Solver tag, e.g. `esfl:ptas` or `est:exact-if-small`.
    pub solver: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Spacing-driving epsilon after internal refinement, when it differs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_inner: Option<f64>,
    pub cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    /// `cost / lower_bound`, a certificate of how far off optimal this run
    /// can possibly be.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_bound: Option<f64>,
    /// Winning line `[a, b, c]` when the solver chose one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holes_before: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holes_after: Option<usize>,
    /// Weight released when line-borne edges were contracted away.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub released_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

impl SolveReport {
    pub fn new(solver: &str, cost: f64) -> Self {
        SolveReport {
            solver: solver.to_string(),
            instance_digest: None,
            epsilon: None,
            epsilon_inner: None,
            cost,
            lower_bound: None,
            ratio_bound: None,
            line: None,
            holes_before: None,
            holes_after: None,
            released_weight: None,
            seed: None,
            timings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    /// One `label: millis` line per recorded phase, for stderr.
    pub fn timing_lines(&self) -> String {
        let mut out = String::new();
        for (label, d) in &self.timings {
            out.push_str(&format!("{label}: {:.3} ms\n", d.as_secs_f64() * 1e3));
        }
        out
    }
}
