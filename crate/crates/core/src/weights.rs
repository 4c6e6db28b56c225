use nalgebra::DVector;

use crate::graph::{Edge, Graph};

/// Flat per-edge projection matrices `P_{g_k}` for fast Laplacian products.
#[derive(Debug, Clone)]
pub(crate) struct EdgeProjections {
    d: usize,
    edges: Vec<Edge>,
    blocks: Vec<f64>,
}

impl EdgeProjections {
    pub(crate) fn new(graph: &Graph, d: usize, bearings: &[DVector<f64>]) -> Self {
        let mut blocks = Vec::with_capacity(graph.m() * d * d);
        for g in bearings {
            for a in 0..d {
                for b in 0..d {
                    let id = if a == b { 1.0 } else { 0.0 };
                    blocks.push(id - g[a] * g[b]);
                }
            }
        }
        Self { d, edges: graph.edges().to_vec(), blocks }
    }

    /// `out = L x` for the matrix-weighted Laplacian.
    pub(crate) fn laplacian_apply(&self, x: &[f64], out: &mut [f64]) {
        let d = self.d;
        out.fill(0.0);
        let mut diff = vec![0.0; d];
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            let p = &self.blocks[k * d * d..(k + 1) * d * d];
            for c in 0..d {
                diff[c] = x[i * d + c] - x[j * d + c];
            }
            for a in 0..d {
                let y: f64 = (0..d).map(|b| p[a * d + b] * diff[b]).sum();
                out[i * d + a] += y;
                out[j * d + a] -= y;
            }
        }
    }
}
