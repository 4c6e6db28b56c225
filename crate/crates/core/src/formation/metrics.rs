use nalgebra::DVector;
use serde::Serialize;

use super::laws::current_bearing;
use super::target::TargetFormation;
use crate::error::Result;

/// `phi_1 = sum over edges of (1 - g_ij^T g*_ij)`.
pub fn phi1(tf: &TargetFormation, p: &DVector<f64>) -> Result<f64> {
    edge_sum(tf, p, |dot, _| 1.0 - dot)
}

/// `phi_2 = 1/2 sum over edges of |e_ij| (1 - g_ij^T g*_ij)`.
pub fn phi2(tf: &TargetFormation, p: &DVector<f64>) -> Result<f64> {
    edge_sum(tf, p, |dot, len| 0.5 * len * (1.0 - dot))
}

fn edge_sum(tf: &TargetFormation, p: &DVector<f64>, f: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let mut total = 0.0;
    for (&(i, j), gs) in tf.graph().edges().iter().zip(tf.desired()) {
        let (g, len) = current_bearing(p, i, j, tf.dim())?;
        total += f(g.dot(gs), len);
    }
    Ok(total)
}

/// `sum |g_ij - g*_ij|` over both orientations of every edge.
pub fn bearing_error(tf: &TargetFormation, p: &DVector<f64>) -> Result<f64> {
    let mut total = 0.0;
    for (&(i, j), gs) in tf.graph().edges().iter().zip(tf.desired()) {
        let (g, _) = current_bearing(p, i, j, tf.dim())?;
        total += 2.0 * (g - gs).norm();
    }
    Ok(total)
}

pub fn centroid(p: &DVector<f64>, d: usize) -> Vec<f64> {
    let n = p.len() / d;
    (0..d).map(|c| (0..n).map(|i| p[i * d + c]).sum::<f64>() / n as f64).collect()
}

/// Root-mean-square distance of the agents to their centroid.
pub fn scale(p: &DVector<f64>, d: usize) -> f64 {
    let n = p.len() / d;
    let c = centroid(p, d);
    let total: f64 = (0..n)
        .map(|i| (0..d).map(|k| (p[i * d + k] - c[k]).powi(2)).sum::<f64>())
        .sum();
    (total / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormationMetrics {
    pub bearing_error: f64,
    pub centroid: Vec<f64>,
    pub scale: f64,
}

pub fn formation_metrics(tf: &TargetFormation, p: &DVector<f64>) -> Result<FormationMetrics> {
    Ok(FormationMetrics {
        bearing_error: bearing_error(tf, p)?,
        centroid: centroid(p, tf.dim()),
        scale: scale(p, tf.dim()),
    })
}
