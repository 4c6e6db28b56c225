//! The JSON network file. Node ids are 1-based in files and 0-based
//! everywhere else.

use std::path::Path;

use bearing_core::formation::TargetFormation;
use bearing_core::localization::AnchoredNetwork;
use bearing_core::rigidity::Se2Network;
use bearing_core::{Graph, Network};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Supplied bearings must be unit vectors up to this tolerance.
pub const UNIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Anchor,
    Leader,
    Follower,
    Agent,
}

impl Role {
    /// Anchors and leaders both hold a prescribed position.
    pub fn is_fixed(self) -> bool {
        matches!(self, Role::Anchor | Role::Leader)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BearingEntry {
    pub edge: [usize; 2],
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub dimension: usize,
    pub nodes: Vec<NodeEntry>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bearings: Option<Vec<BearingEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_bearings: Option<Vec<BearingEntry>>,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Input { field: field.into(), message: message.into() }
}

impl NetworkFile {
    pub fn read(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| invalid(path.display().to_string(), format!("cannot read: {e}")))?;
        let file = Self::parse(&bytes, &path.display().to_string())?;
        Ok((file, bytes))
    }

    pub fn parse(bytes: &[u8], origin: &str) -> Result<Self, CliError> {
        let file: Self = serde_json::from_slice(bytes).map_err(|e| {
            invalid(format!("{origin}:{}:{}", e.line(), e.column()), e.to_string())
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network files always serialize")
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Checks ids, vector lengths and edge endpoints.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.dimension < 2 {
            return Err(invalid("dimension", format!("must be at least 2, got {}", self.dimension)));
        }
        let n = self.nodes.len();
        if n < 2 {
            return Err(invalid("nodes", format!("need at least 2 nodes, got {n}")));
        }
        let mut seen = vec![false; n];
        for (k, node) in self.nodes.iter().enumerate() {
            if node.id == 0 || node.id > n {
                return Err(invalid(
                    format!("nodes[{k}].id"),
                    format!("ids must run from 1 to {n}, got {}", node.id),
                ));
            }
            if std::mem::replace(&mut seen[node.id - 1], true) {
                return Err(invalid(format!("nodes[{k}].id"), format!("duplicate id {}", node.id)));
            }
            if let Some(p) = &node.position {
                if p.len() != self.dimension {
                    return Err(invalid(
                        format!("nodes[{k}].position"),
                        format!("expected {} numbers, got {}", self.dimension, p.len()),
                    ));
                }
            }
        }
        for (k, &[i, j]) in self.edges.iter().enumerate() {
            for v in [i, j] {
                if v == 0 || v > n {
                    return Err(invalid(format!("edges[{k}]"), format!("unknown node id {v}")));
                }
            }
            if i == j {
                return Err(invalid(format!("edges[{k}]"), format!("self-loop at node {i}")));
            }
        }
        for (name, list) in [("bearings", &self.bearings), ("target_bearings", &self.target_bearings)] {
            for (k, b) in list.iter().flatten().enumerate() {
                if b.g.len() != self.dimension {
                    return Err(invalid(
                        format!("{name}[{k}].g"),
                        format!("expected {} numbers, got {}", self.dimension, b.g.len()),
                    ));
                }
                let norm = b.g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !((norm - 1.0).abs() <= UNIT_TOL) {
                    return Err(invalid(format!("{name}[{k}].g"), format!("not a unit vector (norm {norm})")));
                }
            }
        }
        Ok(())
    }

    fn node(&self, index: usize) -> &NodeEntry {
        self.nodes.iter().find(|n| n.id == index + 1).expect("ids validated")
    }

    /// Undirected graph; each directed pair counts once.
    pub fn graph(&self) -> Result<Graph, CliError> {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&[i, j]| ((i - 1).min(j - 1), (i - 1).max(j - 1)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Graph::new(self.n(), edges).map_err(|e| invalid("edges", e.to_string()))
    }

    /// Directed pairs as written, 0-based.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&[i, j]| (i - 1, j - 1)).collect()
    }

    pub fn has_all_positions(&self) -> bool {
        self.nodes.iter().all(|n| n.position.is_some())
    }

    /// Stacked positions of all nodes, in id order.
    pub fn positions(&self) -> Result<DVector<f64>, CliError> {
        let mut out = Vec::with_capacity(self.n() * self.dimension);
        for v in 0..self.n() {
            let node = self.node(v);
            let p = node
                .position
                .as_ref()
                .ok_or_else(|| invalid(format!("nodes[id={}].position", node.id), "missing"))?;
            out.extend_from_slice(p);
        }
        Ok(DVector::from_vec(out))
    }

    pub fn headings(&self) -> Vec<f64> {
        (0..self.n()).map(|v| self.node(v).heading.unwrap_or(0.0)).collect()
    }

    /// 0-based ids of anchor or leader nodes.
    pub fn fixed_nodes(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.node(v).role.is_fixed()).collect()
    }

    pub fn network(&self) -> Result<Network, CliError> {
        Network::new(self.graph()?, self.dimension, self.positions()?)
            .map_err(|e| invalid("nodes", e.to_string()))
    }

    pub fn se2_network(&self) -> Result<Se2Network, CliError> {
        if self.dimension != 2 {
            return Err(invalid("dimension", "SE(2) networks are planar"));
        }
        Se2Network::new(self.n(), self.arcs(), self.positions()?, self.headings())
            .map_err(|e| invalid("edges", e.to_string()))
    }

    /// One vector per canonical edge `i < j` from a bearing list, flipping
    /// entries written against the canonical direction.
    fn per_edge(&self, graph: &Graph, name: &str, list: &[BearingEntry]) -> Result<Vec<DVector<f64>>, CliError> {
        let mut out: Vec<Option<DVector<f64>>> = vec![None; graph.m()];
        for (k, b) in list.iter().enumerate() {
            let (i, j) = (b.edge[0].wrapping_sub(1), b.edge[1].wrapping_sub(1));
            let e = graph
                .edge_index(i, j)
                .ok_or_else(|| invalid(format!("{name}[{k}].edge"), format!("{:?} is not an edge", b.edge)))?;
            let g = DVector::from_column_slice(&b.g);
            let g = if i < j { g } else { -g };
            if let Some(prev) = &out[e] {
                if (prev - &g).amax() > UNIT_TOL {
                    return Err(invalid(format!("{name}[{k}]"), "conflicts with an earlier entry"));
                }
            }
            out[e] = Some(g);
        }
        out.into_iter()
            .enumerate()
            .map(|(e, g)| {
                let (i, j) = graph.edges()[e];
                g.ok_or_else(|| invalid(name, format!("missing bearing for edge [{}, {}]", i + 1, j + 1)))
            })
            .collect()
    }

    /// Localization problem. Measured bearings come from `bearings` when
    /// present and from the positions otherwise. Follower positions, when
    /// all are known, serve as ground truth for error metrics.
    pub fn anchored_network(&self) -> Result<AnchoredNetwork, CliError> {
        let graph = self.graph()?;
        let anchors = self.fixed_nodes();
        if anchors.is_empty() {
            return Err(invalid("nodes", "no node has role \"anchor\""));
        }
        let d = self.dimension;
        let mut anchor_positions = Vec::with_capacity(anchors.len() * d);
        for &a in &anchors {
            let node = self.node(a);
            let p = node
                .position
                .as_ref()
                .ok_or_else(|| invalid(format!("nodes[id={}].position", node.id), "anchors need a position"))?;
            anchor_positions.extend_from_slice(p);
        }
        let bearings = match &self.bearings {
            Some(list) => self.per_edge(&graph, "bearings", list)?,
            None => {
                if !self.has_all_positions() {
                    return Err(invalid("bearings", "needed when some positions are unknown"));
                }
                self.network()?.bearings()
            }
        };
        let an = AnchoredNetwork::with_bearings(graph, d, &anchors, DVector::from_vec(anchor_positions), bearings)
            .map_err(|e| invalid("bearings", e.to_string()))?;
        if self.has_all_positions() {
            return an.with_truth(self.positions()?).map_err(|e| invalid("nodes", e.to_string()));
        }
        Ok(an)
    }

    /// Formation target from `target_bearings`, with leaders taken from
    /// node roles.
    pub fn target_formation(&self) -> Result<TargetFormation, CliError> {
        let graph = self.graph()?;
        let list = self
            .target_bearings
            .as_ref()
            .ok_or_else(|| invalid("target_bearings", "formation control needs desired bearings"))?;
        let desired = self.per_edge(&graph, "target_bearings", list)?;
        TargetFormation::new(graph, self.dimension, desired, &self.fixed_nodes())
            .map_err(|e| invalid("target_bearings", e.to_string()))
    }

    /// Graph-only file for a constructed graph, with optional positions.
    pub fn from_graph(graph: &Graph, dimension: usize, positions: Option<&DVector<f64>>) -> Self {
        let nodes = (0..graph.n())
            .map(|v| NodeEntry {
                id: v + 1,
                position: positions.map(|p| p.rows(v * dimension, dimension).iter().copied().collect()),
                role: Role::Agent,
                heading: None,
            })
            .collect();
        let edges = graph.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect();
        Self { dimension, nodes, edges, bearings: None, target_bearings: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = r#"{
        "dimension": 2,
        "nodes": [
            {"id": 1, "position": [0, 0], "role": "leader"},
            {"id": 2, "position": [1, 0], "role": "leader"},
            {"id": 3, "position": [1, 1], "role": "follower"},
            {"id": 4, "position": [0, 1], "role": "follower", "heading": 0.5}
        ],
        "edges": [[1, 2], [2, 3], [4, 3], [1, 4], [1, 3]],
        "target_bearings": [
            {"edge": [1, 2], "g": [1, 0]},
            {"edge": [2, 3], "g": [0, 1]},
            {"edge": [4, 3], "g": [1, 0]},
            {"edge": [4, 1], "g": [0, -1]},
            {"edge": [1, 3], "g": [0.7071067811865476, 0.7071067811865476]}
        ]
    }"#;

    #[test]
    fn parses_and_converts_ids() {
        let f = NetworkFile::parse(SQUARE.as_bytes(), "square").unwrap();
        let g = f.graph().unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(f.fixed_nodes(), vec![0, 1]);
        assert_eq!(f.headings(), vec![0.0, 0.0, 0.0, 0.5]);
        let tf = f.target_formation().unwrap();
        assert_eq!(tf.desired_bearing(0, 3).unwrap().as_slice(), &[0.0, 1.0]);
        assert_eq!(tf.desired_bearing(2, 3).unwrap().as_slice(), &[-1.0, 0.0]);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let f = NetworkFile::parse(SQUARE.as_bytes(), "square").unwrap();
        let again = NetworkFile::parse(f.to_json().as_bytes(), "again").unwrap();
        assert_eq!(f, again);
        assert_eq!(f.to_json(), again.to_json());
    }

    #[test]
    fn reports_field_paths() {
        let bad = SQUARE.replace("[1, 1], \"role\": \"follower\"", "[1, 1, 1], \"role\": \"follower\"");
        let err = NetworkFile::parse(bad.as_bytes(), "square").unwrap_err();
        assert!(err.to_string().contains("nodes[2].position"), "{err}");
        let bad = SQUARE.replace("\"id\": 4", "\"id\": 3");
        assert!(NetworkFile::parse(bad.as_bytes(), "square").unwrap_err().to_string().contains("duplicate"));
        let bad = SQUARE.replace("[0.7071067811865476, 0.7071067811865476]", "[1, 1]");
        assert!(NetworkFile::parse(bad.as_bytes(), "square").unwrap_err().to_string().contains("unit"));
        let err = NetworkFile::parse(b"{\"dimension\": 2,\n \"nodes\": 3}", "x").unwrap_err();
        assert!(err.to_string().starts_with("x:2:"), "{err}");
    }

    #[test]
    fn missing_target_bearing_is_reported() {
        let bad = SQUARE.replace(",\n            {\"edge\": [1, 3], \"g\": [0.7071067811865476, 0.7071067811865476]}", "");
        let f = NetworkFile::parse(bad.as_bytes(), "square").unwrap();
        let err = f.target_formation().unwrap_err();
        assert!(err.to_string().contains("edge [1, 3]"), "{err}");
    }

    #[test]
    fn shipped_samples_round_trip() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            let (f, bytes) = NetworkFile::read(&p).unwrap();
            let again = NetworkFile::parse(f.to_json().as_bytes(), "again").unwrap();
            assert_eq!(f, again, "{}", p.display());
            let original: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
            let written: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
            // Integers may come back as floats; compare numerically.
            assert_eq!(original.to_string().replace(".0", ""), written.to_string().replace(".0", ""));
        }
    }
}
