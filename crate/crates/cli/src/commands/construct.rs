use std::path::PathBuf;

use bearing_core::graph::{is_laman, random_henneberg, HennebergStep};
use bearing_core::sim::random_configuration_with;
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::files::NetworkFile;
use crate::Run;

pub const GRAPH_FILE: &str = "graph.json";

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Build a Laman graph on this many vertices by random Henneberg steps.
    #[arg(long, value_name = "N", conflicts_with = "laman_check", required_unless_present = "laman_check")]
    pub henneberg: Option<usize>,
    /// Test the Laman condition on the graph of a network file.
    #[arg(long, value_name = "FILE")]
    pub laman_check: Option<PathBuf>,
    /// Dimension recorded in the constructed graph file.
    #[arg(long, default_value_t = 2)]
    pub dimension: usize,
    /// Also place the nodes at random points of the unit cube.
    #[arg(long)]
    pub with_positions: bool,
}

fn step_json(s: &HennebergStep) -> Value {
    match *s {
        HennebergStep::VertexAddition { i, j } => json!({"op": "vertex_addition", "attach": [i + 1, j + 1]}),
        HennebergStep::EdgeSplitting { i, j, k } => {
            json!({"op": "edge_splitting", "split": [i + 1, j + 1], "attach": k + 1})
        }
    }
}

pub fn run(args: &ConstructArgs, run: &mut Run) -> Result<(), CliError> {
    if let Some(path) = &args.laman_check {
        let file = run.load(path)?;
        let check = is_laman(&file.graph()?)?;
        run.report.set("is_laman", check.is_laman);
        run.report.set("edge_count", check.edge_count);
        run.report.set("required_edges", check.required_edges);
        let subset = check.violating_subset.map(|s| s.iter().map(|v| v + 1).collect::<Vec<_>>());
        run.report.set("violating_subset", subset);
        return Ok(());
    }
    let n = args.henneberg.expect("clap requires one of the two modes");
    if args.dimension < 2 {
        return Err(CliError::Input { field: "--dimension".into(), message: "must be at least 2".into() });
    }
    let seed = run.common.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (graph, steps) = random_henneberg(n, &mut rng)?;
    let positions = if args.with_positions {
        Some(random_configuration_with(&mut rng, n, args.dimension, (0.0, 1.0), Some(&graph)))
    } else {
        None
    };
    let file = NetworkFile::from_graph(&graph, args.dimension, positions.as_ref());
    run.write(GRAPH_FILE, &(file.to_json() + "\n"))?;
    let check = is_laman(&graph)?;
    run.report.set("n", n);
    run.report.set("m", graph.m());
    run.report.set("seed", seed);
    run.report.set("steps", steps.iter().map(step_json).collect::<Vec<_>>());
    run.report.set("is_laman", check.is_laman);
    Ok(())
}
