use std::path::PathBuf;

use bearing_core::rigidity::{
    is_generically_bearing_rigid, is_infinitesimally_bearing_rigid, is_infinitesimally_distance_rigid,
    is_se2_infinitesimally_rigid,
};
use bearing_core::{linalg::Spectrum, RigidityReport, RANK_TOL};
use clap::{Args, ValueEnum};

use crate::error::CliError;
use crate::report::per_node;
use crate::Run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Bearing,
    Distance,
    Se2,
    Generic,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Network file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Bearing)]
    pub mode: Mode,
    /// Random configurations sampled in generic mode.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

fn record(run: &mut Run, r: &RigidityReport, width: usize) {
    let rep = &mut run.report;
    rep.set("rank", r.rank);
    rep.set("nullity", r.nullity);
    rep.set("expected_rank", r.expected_rank);
    rep.set("verdict", r.verdict);
    rep.set("trivial_dimension", r.trivial_dimension);
    rep.set("singular_values", &r.singular_values);
    rep.set("witness", r.witness.as_ref().map(|w| per_node(w, width, "motion")));
}

pub fn run(args: &AnalyzeArgs, run: &mut Run) -> Result<(), CliError> {
    let file = run.load(&args.input)?;
    let d = file.dimension;
    run.report.set("mode", format!("{:?}", args.mode).to_lowercase());
    run.report.set("n", file.n());
    run.report.set("dimension", d);
    match args.mode {
        Mode::Bearing => {
            let net = file.network()?;
            let r = is_infinitesimally_bearing_rigid(&net);
            record(run, &r, d);
            let laplacian_rank = Spectrum::of(&net.bearing_laplacian()).rank(RANK_TOL);
            run.report.set("edges", net.graph().m());
            run.report.set("laplacian_rank", laplacian_rank);
        }
        Mode::Distance => {
            let net = file.network()?;
            let r = is_infinitesimally_distance_rigid(&net);
            record(run, &r, d);
            run.report.set("edges", net.graph().m());
        }
        Mode::Se2 => {
            let net = file.se2_network()?;
            let r = is_se2_infinitesimally_rigid(&net);
            // Each node moves by (dx, dy, dtheta).
            let witness = r.witness.as_ref().map(|w| {
                let n = net.n();
                let motion: Vec<f64> = (0..n).flat_map(|i| [w[2 * i], w[2 * i + 1], w[2 * n + i]]).collect();
                per_node(&motion, 3, "motion")
            });
            record(run, &r, 3);
            run.report.set("witness", witness);
            run.report.set("arcs", net.arcs().len());
        }
        Mode::Generic => {
            let g = file.graph()?;
            let r = is_generically_bearing_rigid(&g, d, args.trials, run.common.seed)?;
            run.report.set("edges", g.m());
            run.report.set("verdict", r.verdict);
            run.report.set("trials_run", r.trials_run);
            run.report.set("certifying_trial", r.certifying_trial);
            run.report.set("expected_rank", r.expected_rank);
            run.report.set("best_rank", r.best_rank);
            run.report.set("seed", r.seed);
        }
    }
    Ok(())
}
