//! Browser demo: planar networks edited on a canvas.
//!
//! Every export takes and returns JSON text. A scene is
//! `{"points": [[x, y], ..], "edges": [[i, j], ..]}` with 0-based indices.

use bearing_core::formation::{FormationSystem, Gains, Law, LeaderMotion, TargetFormation};
use bearing_core::linalg::Spectrum;
use bearing_core::localization::{is_bearing_localizable, solve_localization, AnchoredNetwork};
use bearing_core::rigidity::{is_infinitesimally_bearing_rigid, Network};
use bearing_core::sim::{integrate, SimConfig};
use bearing_core::{Graph, RANK_TOL};
use serde::Deserialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

#[derive(Debug, Deserialize)]
pub struct Scene {
    pub points: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub anchors: Vec<usize>,
}

#[derive(Debug, Deserialize)]
pub struct FormationRequest {
    pub scene: Scene,
    /// Shape whose bearings become the target.
    pub target: Vec<[f64; 2]>,
    #[serde(default = "default_law")]
    pub law: String,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_frames")]
    pub frames: usize,
}

fn default_law() -> String {
    "bearing-only".into()
}

fn default_horizon() -> f64 {
    20.0
}

fn default_frames() -> usize {
    200
}

fn network(scene: &Scene, points: &[[f64; 2]]) -> Result<Network, String> {
    let edges = scene.edges.iter().map(|&[i, j]| (i.min(j), i.max(j)));
    let mut edges: Vec<_> = edges.collect();
    edges.sort_unstable();
    edges.dedup();
    let graph = Graph::new(points.len(), edges).map_err(|e| e.to_string())?;
    let p: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    Network::from_points(graph, &p).map_err(|e| e.to_string())
}

fn parse<T: for<'a> Deserialize<'a>>(text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("bad request: {e}"))
}

/// Rank verdict and, when flexible, a nontrivial motion per node.
pub fn analyze_scene(text: &str) -> Result<Value, String> {
    let scene: Scene = parse(text)?;
    let net = network(&scene, &scene.points)?;
    let r = is_infinitesimally_bearing_rigid(&net);
    Ok(json!({
        "rank": r.rank,
        "expected_rank": r.expected_rank,
        "rigid": r.is_rigid(),
        "laplacian_rank": Spectrum::of(&net.bearing_laplacian()).rank(RANK_TOL),
        "witness": r.witness.map(|w| w.chunks(2).map(|c| [c[0], c[1]]).collect::<Vec<_>>()),
    }))
}

/// Localizability with the scene's anchors and, when possible, the
/// follower positions recovered from bearings alone.
pub fn localize_scene(text: &str) -> Result<Value, String> {
    let scene: Scene = parse(text)?;
    let net = network(&scene, &scene.points)?;
    let an = AnchoredNetwork::from_network(&net, &scene.anchors).map_err(|e| e.to_string())?;
    let report = is_bearing_localizable(&an);
    let positions = if report.localizable && !an.followers().is_empty() {
        let sol = solve_localization(&an).map_err(|e| e.to_string())?;
        Some(sol.positions.chunks(2).map(|c| [c[0], c[1]]).collect::<Vec<_>>())
    } else {
        None
    };
    Ok(json!({
        "localizable": report.localizable,
        "anchor_bound": report.anchor_bound,
        "laplacian_nullity": report.laplacian_nullity,
        "positions": positions,
        "motion": report.follower_motion.map(|m| m.chunks(2).map(|c| [c[0], c[1]]).collect::<Vec<_>>()),
    }))
}

/// Runs a leaderless bearing-only law from the scene toward the target
/// shape and returns evenly spaced frames.
pub fn formation_scene(text: &str) -> Result<Value, String> {
    let req: FormationRequest = parse(text)?;
    if req.target.len() != req.scene.points.len() {
        return Err("target needs one point per node".into());
    }
    let law: Law = req.law.parse().map_err(|e: bearing_core::Error| e.to_string())?;
    let target = network(&req.scene, &req.target)?;
    let tf = TargetFormation::from_configuration(&target, &[]).map_err(|e| e.to_string())?;
    let sys = FormationSystem::new(tf, law, Gains::default(), LeaderMotion::Stationary).map_err(|e| e.to_string())?;
    let start = network(&req.scene, &req.scene.points)?;
    let x0 = sys.initial_state(start.positions(), None, None).map_err(|e| e.to_string())?;
    let dt = 1e-2;
    let steps = (req.horizon / dt).ceil().max(1.0) as usize;
    let cfg = SimConfig {
        dt,
        horizon: req.horizon,
        record_every: (steps / req.frames.max(1)).max(1),
        ..SimConfig::default()
    };
    let traj = integrate(&sys, &x0, &cfg).map_err(|e| e.to_string())?;
    let n = req.scene.points.len();
    let frames: Vec<Vec<[f64; 2]>> = traj
        .states
        .iter()
        .map(|x| (0..n).map(|i| [x[2 * i], x[2 * i + 1]]).collect())
        .collect();
    Ok(json!({
        "times": traj.times,
        "frames": frames,
        "bearing_error": traj.metric("bearing_error"),
        "events": traj.events,
    }))
}

fn respond(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analyze(scene: &str) -> Result<String, JsValue> {
    respond(analyze_scene(scene))
}

#[wasm_bindgen]
pub fn localize(scene: &str) -> Result<String, JsValue> {
    respond(localize_scene(scene))
}

#[wasm_bindgen]
pub fn formation(request: &str) -> Result<String, JsValue> {
    respond(formation_scene(request))
}
