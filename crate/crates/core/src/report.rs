//! Machine-readable run reports.
//!
//! Field order is fixed by the struct declarations, so two runs of the same
//! command serialize identically apart from `wall_time_ms` and the per-result
//! `elapsed_ms`.

use serde::Serialize;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    /// Each format as `[N, es, rs]`, or `[N, es]` for standard posits.
    pub formats: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Vec<T>,
    pub wall_time_ms: f64,
}

impl<T: Serialize> RunReport<T> {
    pub fn new(command: Vec<String>, formats: Vec<Vec<u32>>, seed: Option<u64>, results: Vec<T>, wall_time_ms: f64) -> Self {
        RunReport { tool: TOOL_NAME, version: TOOL_VERSION, command, formats, seed, results, wall_time_ms }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report types serialize infallibly")
    }
}
