//! Trajectory tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bearing_core::sim::Trajectory;
use clap::ValueEnum;
use serde_json::json;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn columns(traj: &Trajectory) -> Vec<String> {
    std::iter::once("t".to_string())
        .chain(traj.state_names.iter().cloned())
        .chain(traj.metric_names.iter().cloned())
        .collect()
}

pub fn to_csv(traj: &Trajectory) -> String {
    let mut out = columns(traj).join(",");
    out.push('\n');
    for k in 0..traj.len() {
        let row = std::iter::once(traj.times[k])
            .chain(traj.states[k].iter().copied())
            .chain(traj.metrics[k].iter().copied());
        for (c, v) in row.enumerate() {
            if c > 0 {
                out.push(',');
            }
            write!(out, "{}", fmt_f64(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn to_json(traj: &Trajectory) -> String {
    let rows: Vec<Vec<f64>> = (0..traj.len())
        .map(|k| {
            std::iter::once(traj.times[k])
                .chain(traj.states[k].iter().copied())
                .chain(traj.metrics[k].iter().copied())
                .collect()
        })
        .collect();
    serde_json::to_string(&json!({"columns": columns(traj), "rows": rows})).expect("finite tables serialize")
}

pub fn write_trajectory(dir: &Path, traj: &Trajectory, format: Format) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("trajectory.{}", format.extension()));
    let text = match format {
        Format::Csv => to_csv(traj),
        Format::Json => to_json(traj),
    };
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
