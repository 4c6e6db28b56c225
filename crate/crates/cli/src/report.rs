//! The JSON run report written by every invocation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bearing_core::sim::{Event, EventRecord, Trajectory};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, EXIT_OK};

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub args: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub status: String,
    pub exit_code: i32,
    pub error: Option<ErrorInfo>,
    pub result: BTreeMap<String, Value>,
    /// Last recorded value of every trajectory metric.
    pub final_metrics: BTreeMap<String, f64>,
    pub events: Vec<Value>,
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, args: Vec<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            args,
            inputs: Vec::new(),
            status: "ok".into(),
            exit_code: EXIT_OK,
            error: None,
            result: BTreeMap::new(),
            final_metrics: BTreeMap::new(),
            events: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("report values serialize");
        self.result.insert(key.to_string(), value);
    }

    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        let sha256 = Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256 });
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn record_trajectory(&mut self, traj: &Trajectory) {
        if !traj.is_empty() {
            for (name, &v) in traj.metric_names.iter().zip(traj.final_metrics()) {
                self.final_metrics.insert(name.clone(), v);
            }
        }
        self.events = traj.events.iter().map(event_json).collect();
        self.set("final_time", if traj.is_empty() { 0.0 } else { traj.final_time() });
        self.set("converged", traj.converged());
        self.set("snapshots", traj.len());
    }

    pub fn fail(&mut self, err: &CliError) {
        self.status = "error".into();
        self.exit_code = err.exit_code();
        self.error = Some(ErrorInfo { kind: err.kind().into(), message: err.to_string() });
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(REPORT_FILE);
        let text = serde_json::to_string_pretty(self).expect("reports serialize");
        std::fs::write(&path, text + "\n")
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Event with 1-based node ids.
pub fn event_json(rec: &EventRecord) -> Value {
    match &rec.event {
        Event::Converged { field_norm } => json!({"t": rec.t, "kind": "converged", "field_norm": field_norm}),
        Event::Collocation { i, j } => json!({"t": rec.t, "kind": "collocation", "i": i + 1, "j": j + 1}),
        Event::SingularGain { follower } => {
            json!({"t": rec.t, "kind": "singular_gain", "follower": follower + 1})
        }
        Event::NonFinite => json!({"t": rec.t, "kind": "non_finite"}),
    }
}

/// Turns the first error event of a run into the error that sets the exit
/// code.
pub fn check_events(traj: &Trajectory) -> Result<(), CliError> {
    match traj.error_events().next() {
        None => Ok(()),
        Some(rec) => {
            let (message, infeasible) = match rec.event {
                Event::Collocation { i, j } => (format!("nodes {} and {} collocated", i + 1, j + 1), false),
                Event::SingularGain { follower } => {
                    (format!("gain matrix of follower {} became singular", follower + 1), true)
                }
                Event::NonFinite => ("state became non-finite".to_string(), false),
                Event::Converged { .. } => unreachable!("convergence is not an error"),
            };
            Err(CliError::Event { message: format!("{message} at t = {}", rec.t), infeasible })
        }
    }
}

/// Splits a stacked vector into `{"id": k, "<name>": [..]}` entries of
/// `width` components, with 1-based ids.
pub fn per_node(v: &[f64], width: usize, name: &str) -> Vec<Value> {
    v.chunks(width)
        .enumerate()
        .map(|(k, c)| json!({"id": k + 1, name: c}))
        .collect()
}
