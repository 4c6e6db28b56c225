use nalgebra::{DMatrix, DVector};

use super::projection::projection;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::EPS_DIST;

/// A graph with a `d`-dimensional configuration.
///
/// Positions are stacked as `p = [p_0; p_1; ...]` of length `d n`. No two
/// adjacent nodes may be closer than [`EPS_DIST`].
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    graph: Graph,
    dim: usize,
    positions: DVector<f64>,
}

impl Network {
    pub fn new(graph: Graph, dim: usize, positions: DVector<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        if graph.n() < 2 {
            return Err(Error::TooFewVertices { n: graph.n(), min: 2 });
        }
        if positions.len() != dim * graph.n() {
            return Err(Error::DimensionMismatch {
                expected: dim * graph.n(),
                got: positions.len(),
            });
        }
        check_collocation(&graph, dim, positions.as_slice())?;
        Ok(Self { graph, dim, positions })
    }

    /// Builds from one coordinate row per node.
    pub fn from_points(graph: Graph, points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.len());
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
        }
        let flat: Vec<f64> = points.iter().flatten().copied().collect();
        Self::new(graph, dim, DVector::from_vec(flat))
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn positions(&self) -> &DVector<f64> {
        &self.positions
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions.as_slice()[i * self.dim..(i + 1) * self.dim]
    }

    /// Same graph with a new configuration.
    pub fn with_positions(&self, positions: DVector<f64>) -> Result<Self> {
        Self::new(self.graph.clone(), self.dim, positions)
    }

    /// Same configuration on a different graph.
    pub fn with_graph(&self, graph: Graph) -> Result<Self> {
        Self::new(graph, self.dim, self.positions.clone())
    }

    /// Embeds the configuration in a higher dimension with zero padding.
    pub fn lifted(&self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(Error::BadDimension(dim));
        }
        let mut p = DVector::zeros(dim * self.n());
        for i in 0..self.n() {
            p.rows_mut(i * dim, self.dim).copy_from_slice(self.position(i));
        }
        Self::new(self.graph.clone(), dim, p)
    }

    /// Edge vectors `e_k = p_j - p_i` in canonical edge order.
    pub fn edge_vectors(&self) -> Vec<DVector<f64>> {
        self.graph
            .edges()
            .iter()
            .map(|&(i, j)| {
                DVector::from_iterator(
                    self.dim,
                    self.position(j).iter().zip(self.position(i)).map(|(a, b)| a - b),
                )
            })
            .collect()
    }

    /// Unit bearings `g_k = e_k / |e_k|` in canonical edge order.
    pub fn bearings(&self) -> Vec<DVector<f64>> {
        self.edge_vectors().into_iter().map(|e| e.normalize()).collect()
    }

    /// Stacked bearing vector of length `d m`.
    pub fn bearing_function(&self) -> DVector<f64> {
        stack(&self.bearings())
    }

    /// Stacked half squared lengths `|e_k|^2 / 2`.
    pub fn distance_function(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.graph.m(),
            self.edge_vectors().iter().map(|e| 0.5 * e.norm_squared()),
        )
    }

    /// `R_B = blockdiag(P_{g_k} / |e_k|) (H ⊗ I_d)`, assembled block by block.
    pub fn bearing_rigidity_matrix(&self) -> DMatrix<f64> {
        let d = self.dim;
        let mut r = DMatrix::zeros(d * self.graph.m(), d * self.n());
        for (k, (&(i, j), e)) in self.graph.edges().iter().zip(self.edge_vectors()).enumerate() {
            let block = projection(&e).expect("collocation checked at construction") / e.norm();
            r.view_mut((k * d, i * d), (d, d)).copy_from(&(-&block));
            r.view_mut((k * d, j * d), (d, d)).copy_from(&block);
        }
        r
    }

    /// `R_D = blockdiag(e_k^T) (H ⊗ I_d)`.
    pub fn distance_rigidity_matrix(&self) -> DMatrix<f64> {
        let d = self.dim;
        let mut r = DMatrix::zeros(self.graph.m(), d * self.n());
        for (k, (&(i, j), e)) in self.graph.edges().iter().zip(self.edge_vectors()).enumerate() {
            for c in 0..d {
                r[(k, i * d + c)] = -e[c];
                r[(k, j * d + c)] = e[c];
            }
        }
        r
    }

    /// Bearing Laplacian of the network's own bearings.
    pub fn bearing_laplacian(&self) -> DMatrix<f64> {
        bearing_laplacian_from(&self.graph, self.dim, &self.bearings())
    }
}

/// Matrix-weighted Laplacian with weight `P_{g_k}` on edge `k`.
///
/// `bearings[k]` belongs to the `k`-th canonical edge; its sign does not
/// matter because `P_g = P_{-g}`.
pub fn bearing_laplacian_from(graph: &Graph, dim: usize, bearings: &[DVector<f64>]) -> DMatrix<f64> {
    let d = dim;
    let mut l = DMatrix::zeros(d * graph.n(), d * graph.n());
    for (&(i, j), g) in graph.edges().iter().zip(bearings) {
        let p = DMatrix::identity(d, d) - g * g.transpose();
        for (a, b, s) in [(i, i, 1.0), (j, j, 1.0), (i, j, -1.0), (j, i, -1.0)] {
            let mut view = l.view_mut((a * d, b * d), (d, d));
            view += &p * s;
        }
    }
    l
}

pub(crate) fn check_collocation(graph: &Graph, dim: usize, p: &[f64]) -> Result<()> {
    for &(i, j) in graph.edges() {
        let dist = p[i * dim..(i + 1) * dim]
            .iter()
            .zip(&p[j * dim..(j + 1) * dim])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if !(dist > EPS_DIST) {
            return Err(Error::Collocated { i, j });
        }
    }
    Ok(())
}

pub(crate) fn stack(blocks: &[DVector<f64>]) -> DVector<f64> {
    DVector::from_iterator(
        blocks.iter().map(|b| b.len()).sum(),
        blocks.iter().flat_map(|b| b.iter().copied()),
    )
}
