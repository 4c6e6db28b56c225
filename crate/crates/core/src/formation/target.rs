use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Spectrum;
use crate::localization::{AnchoredNetwork, LaplacianPartition};
use crate::rigidity::{bearing_laplacian_from, Network};
use crate::{EPS_DIST, RANK_TOL};

/// Desired bearings on the edges of a graph, with an optional leader set.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFormation {
    graph: Graph,
    dim: usize,
    desired: Vec<DVector<f64>>,
    leaders: Vec<usize>,
    followers: Vec<usize>,
}

impl TargetFormation {
    /// `desired[k]` is `g*_ij` for the `k`-th canonical edge `i -> j`,
    /// `i < j`. Vectors are renormalized.
    pub fn new(graph: Graph, dim: usize, desired: Vec<DVector<f64>>, leaders: &[usize]) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        if desired.len() != graph.m() {
            return Err(Error::DimensionMismatch { expected: graph.m(), got: desired.len() });
        }
        let mut unit = Vec::with_capacity(desired.len());
        for (g, &(i, j)) in desired.into_iter().zip(graph.edges()) {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
            }
            let norm = g.norm();
            if !(norm > EPS_DIST) || !norm.is_finite() {
                return Err(Error::InvalidBearing { i, j, reason: format!("norm {norm}") });
            }
            unit.push(g / norm);
        }
        let mut leaders = leaders.to_vec();
        leaders.sort_unstable();
        leaders.dedup();
        if let Some(&index) = leaders.iter().find(|&&l| l >= graph.n()) {
            return Err(Error::VertexOutOfRange { index, n: graph.n() });
        }
        let followers = (0..graph.n()).filter(|v| leaders.binary_search(v).is_err()).collect();
        Ok(Self { graph, dim, desired: unit, leaders, followers })
    }

    /// The bearings realized by a configuration.
    pub fn from_configuration(net: &Network, leaders: &[usize]) -> Result<Self> {
        Self::new(net.graph().clone(), net.dim(), net.bearings(), leaders)
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

    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    pub fn followers(&self) -> &[usize] {
        &self.followers
    }

    pub fn is_leader(&self, i: usize) -> bool {
        self.leaders.binary_search(&i).is_ok()
    }

    /// Desired bearings per canonical edge.
    pub fn desired(&self) -> &[DVector<f64>] {
        &self.desired
    }

    /// `g*_ij` for either orientation of an edge.
    pub fn desired_bearing(&self, i: usize, j: usize) -> Option<DVector<f64>> {
        let k = self.graph.edge_index(i, j)?;
        Some(if i < j { self.desired[k].clone() } else { -&self.desired[k] })
    }

    /// Bearing Laplacian built from the desired bearings.
    pub fn laplacian(&self) -> DMatrix<f64> {
        bearing_laplacian_from(&self.graph, self.dim, &self.desired)
    }

    /// Laplacian blocks with the leaders in the anchor role.
    pub fn partition(&self) -> LaplacianPartition {
        LaplacianPartition::of(&self.laplacian(), self.dim, &self.leaders, &self.followers)
    }

    /// The localization problem obtained by treating leaders as anchors.
    pub fn as_localization(&self, leader_positions: DVector<f64>) -> Result<AnchoredNetwork> {
        AnchoredNetwork::with_bearings(
            self.graph.clone(),
            self.dim,
            &self.leaders,
            leader_positions,
            self.desired.clone(),
        )
    }

    /// `K_i = sum_j P_{g*_ij}`.
    pub fn gain_matrix(&self, i: usize) -> DMatrix<f64> {
        let d = self.dim;
        let mut k = DMatrix::zeros(d, d);
        for &j in self.graph.neighbors(i) {
            let g = &self.desired[self.graph.edge_index(i, j).expect("neighbor implies edge")];
            k += DMatrix::identity(d, d) - g * g.transpose();
        }
        k
    }

    /// Fails on the first follower whose `K_i` is numerically singular.
    pub fn check_gain_matrices(&self) -> Result<()> {
        for &f in &self.followers {
            let s = Spectrum::of(&self.gain_matrix(f));
            if s.rank(RANK_TOL) < self.dim {
                return Err(Error::SingularGain { follower: f });
            }
        }
        Ok(())
    }
}

/// Positive control gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub kp: f64,
    pub ki: f64,
    pub kv: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Self { kp: 1.0, ki: 1.0, kv: 1.0 }
    }
}

impl Gains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kp", self.kp), ("ki", self.ki), ("kv", self.kv)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidGains(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}
