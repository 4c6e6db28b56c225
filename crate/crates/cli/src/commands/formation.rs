use std::path::PathBuf;

use bearing_core::formation::{FormationSystem, Gains, Law, LeaderMotion};
use bearing_core::sim::{integrate, Trajectory};
use clap::Args;

use crate::error::CliError;
use crate::output::write_trajectory;
use crate::report::check_events;
use crate::Run;

#[derive(Debug, Args)]
pub struct FormationArgs {
    /// Network file with initial positions and target bearings.
    pub input: PathBuf,
    /// si, si-pi, si-vel, di, di-acc, unicycle, bearing-only,
    /// bearing-gradient or bearing-descent.
    #[arg(long)]
    pub law: String,
    /// Positive gains `kp,ki,kv`.
    #[arg(long, default_value = "1,1,1")]
    pub gains: String,
    /// `none`, `const:v1,..,vd` or `sine:amp,freq,phase`. A single value
    /// applies to every axis; otherwise give one value per axis, with
    /// sine values grouped as all amplitudes, then frequencies, then phases.
    #[arg(long, default_value = "none")]
    pub leader_motion: String,
}

fn input_error(field: &str, message: impl Into<String>) -> CliError {
    CliError::Input { field: field.into(), message: message.into() }
}

fn numbers(field: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| input_error(field, format!("{t:?} is not a number"))))
        .collect()
}

pub fn parse_gains(s: &str) -> Result<Gains, CliError> {
    match numbers("--gains", s)?[..] {
        [kp, ki, kv] => Ok(Gains { kp, ki, kv }),
        _ => Err(input_error("--gains", "expected kp,ki,kv")),
    }
}

pub fn parse_leader_motion(s: &str, d: usize) -> Result<LeaderMotion, CliError> {
    const FIELD: &str = "--leader-motion";
    if s == "none" {
        return Ok(LeaderMotion::Stationary);
    }
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| input_error(FIELD, format!("expected none, const:.. or sine:.., got {s:?}")))?;
    let v = numbers(FIELD, rest)?;
    let axes = |v: &[f64]| if v.len() == 1 { vec![v[0]; d] } else { v.to_vec() };
    match kind {
        "const" if v.len() == 1 || v.len() == d => Ok(LeaderMotion::Constant { velocity: axes(&v) }),
        "const" => Err(input_error(FIELD, format!("const needs 1 or {d} values"))),
        "sine" if v.len() == 3 => Ok(LeaderMotion::Sinusoidal {
            amplitude: vec![v[0]; d],
            frequency: vec![v[1]; d],
            phase: vec![v[2]; d],
        }),
        "sine" if v.len() == 3 * d => Ok(LeaderMotion::Sinusoidal {
            amplitude: v[..d].to_vec(),
            frequency: v[d..2 * d].to_vec(),
            phase: v[2 * d..].to_vec(),
        }),
        "sine" => Err(input_error(FIELD, format!("sine needs 3 or {} values", 3 * d))),
        _ => Err(input_error(FIELD, format!("unknown motion {kind:?}"))),
    }
}

/// Largest deviation of a metric from its initial value.
fn drift(traj: &Trajectory, name: &str) -> Option<f64> {
    let m = traj.metric(name)?;
    Some(m.iter().map(|v| (v - m[0]).abs()).fold(0.0, f64::max))
}

pub fn run(args: &FormationArgs, run: &mut Run) -> Result<(), CliError> {
    let file = run.load(&args.input)?;
    let law: Law = args.law.parse().map_err(|e: bearing_core::Error| input_error("--law", e.to_string()))?;
    let gains = parse_gains(&args.gains)?;
    let motion = parse_leader_motion(&args.leader_motion, file.dimension)?;
    let cfg = run.common.sim_config()?;
    let tf = file.target_formation()?;
    let positions = file.positions()?;
    let headings = file.headings();
    run.report.set("law", law.name());
    run.report.set("gains", gains);
    run.report.set("leader_motion", &motion);
    run.report.set("leaders", tf.leaders().iter().map(|l| l + 1).collect::<Vec<_>>());
    let sys = FormationSystem::new(tf, law, gains, motion)?;
    let x0 = sys.initial_state(&positions, Some(&headings), None)?;
    let traj = integrate(&sys, &x0, &cfg)?;
    let path = write_trajectory(&run.common.output_dir, &traj, run.common.format)?;
    run.report.add_output(&path);
    run.report.record_trajectory(&traj);
    let centroid_drift = traj
        .metric_names
        .iter()
        .filter(|n| n.starts_with("centroid_"))
        .filter_map(|n| drift(&traj, n))
        .fold(0.0, f64::max);
    run.report.set("centroid_drift", centroid_drift);
    run.report.set("scale_drift", drift(&traj, "scale"));
    check_events(&traj)
}
