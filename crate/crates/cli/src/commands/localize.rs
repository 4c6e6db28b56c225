use std::path::PathBuf;

use bearing_core::localization::{
    is_bearing_localizable, random_initial_guess, simulate_localization, solve_localization, AnchoredNetwork,
    LocalizabilityReport,
};
use clap::Args;
use nalgebra::DVector;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::write_trajectory;
use crate::report::{check_events, per_node};
use crate::Run;

pub const SOLUTION_FILE: &str = "solution.json";

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    /// Network file with anchors, and bearings or true positions.
    pub input: PathBuf,
    /// Closed-form least-squares estimate.
    #[arg(long, conflicts_with = "simulate", required_unless_present = "simulate")]
    pub solve: bool,
    /// Integrate the distributed gradient protocol.
    #[arg(long)]
    pub simulate: bool,
    /// `random`, or a network file giving initial follower estimates.
    #[arg(long, default_value = "random")]
    pub init: String,
}

fn localizability_json(r: &LocalizabilityReport, d: usize) -> Value {
    json!({
        "localizable": r.localizable,
        "anchors": r.anchors,
        "followers": r.followers,
        "sigma_min": r.sigma_min,
        "sigma_max": r.sigma_max,
        "threshold": r.threshold,
        "laplacian_rank": r.laplacian_rank,
        "laplacian_nullity": r.laplacian_nullity,
        "anchor_bound": r.anchor_bound,
        "anchor_bound_met": r.anchor_bound_met,
        "follower_motion": r.follower_motion.as_ref().map(|m| per_node(m, d, "motion")),
    })
}

/// Box around the anchors, padded by half its widest side.
fn init_bounds(an: &AnchoredNetwork) -> (f64, f64) {
    let a = an.anchor_positions();
    let (lo, hi) = (a.min(), a.max());
    let pad = 0.5 * (hi - lo).max(1.0);
    (lo - pad, hi + pad)
}

fn initial_guess(source: &str, an: &AnchoredNetwork, run: &mut Run) -> Result<DVector<f64>, CliError> {
    if source == "random" {
        return Ok(random_initial_guess(an, init_bounds(an), run.common.seed));
    }
    let file = run.load(&PathBuf::from(source))?;
    if file.n() != an.n() || file.dimension != an.dim() {
        return Err(CliError::Input {
            field: "--init".into(),
            message: format!("expected {} nodes in dimension {}", an.n(), an.dim()),
        });
    }
    let mut out = Vec::with_capacity(an.followers().len() * an.dim());
    for &f in an.followers() {
        let node = file.nodes.iter().find(|n| n.id == f + 1).expect("ids validated");
        let p = node.position.as_ref().ok_or_else(|| CliError::Input {
            field: format!("--init: nodes[id={}].position", f + 1),
            message: "missing".into(),
        })?;
        out.extend_from_slice(p);
    }
    Ok(DVector::from_vec(out))
}

pub fn run(args: &LocalizeArgs, run: &mut Run) -> Result<(), CliError> {
    let file = run.load(&args.input)?;
    let an = file.anchored_network()?;
    let d = an.dim();
    let report = is_bearing_localizable(&an);
    run.report.set("localizability", localizability_json(&report, d));
    run.report.set("anchors", an.anchors().iter().map(|a| a + 1).collect::<Vec<_>>());
    if args.solve {
        if !report.localizable {
            return Err(CliError::Infeasible(format!(
                "network is not bearing localizable: sigma_min(L_ff) = {:e} <= {:e}; \
                 {} anchors against a necessary bound of {} (nullity of L = {}, d = {d})",
                report.sigma_min.unwrap_or(0.0),
                report.threshold,
                report.anchors,
                report.anchor_bound,
                report.laplacian_nullity,
            )));
        }
        let sol = solve_localization(&an)?;
        run.report.set("positions", per_node(&sol.positions, d, "position"));
        run.report.set("condition", sol.condition);
        run.report.set("objective", sol.objective);
        if let Some(truth) = an.truth() {
            let err = (0..an.n())
                .map(|i| (0..d).map(|c| (sol.positions[i * d + c] - truth[i * d + c]).powi(2)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            run.report.set("max_error", err);
        }
        let mut out = file;
        for node in &mut out.nodes {
            let i = node.id - 1;
            node.position = Some(sol.positions[i * d..(i + 1) * d].to_vec());
        }
        return run.write(SOLUTION_FILE, &(out.to_json() + "\n"));
    }
    let cfg = run.common.sim_config()?;
    let init = initial_guess(&args.init, &an, run)?;
    let result = simulate_localization(&an, init.as_slice(), &cfg)?;
    if !result.localizable {
        run.report.set(
            "warning",
            "network is not bearing localizable; estimates settle off the truth along the null space of L_ff",
        );
    }
    run.report.set("localizable", result.localizable);
    let path = write_trajectory(&run.common.output_dir, &result.trajectory, run.common.format)?;
    run.report.add_output(&path);
    run.report.record_trajectory(&result.trajectory);
    check_events(&result.trajectory)
}
