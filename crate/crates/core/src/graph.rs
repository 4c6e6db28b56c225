//! Undirected graphs, orientations, Laman recognition and Henneberg
//! construction.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered vertex pair.
pub type Edge = (usize, usize);

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are deduplicated and stored as `(i, j)` with `i < j`, sorted
/// lexicographically, so the edge list doubles as the canonical orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n, raw.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph { n: g.n, edges: g.edges }
    }
}

impl Graph {
    /// Builds a graph from an edge list, collapsing `(i, j)` and `(j, i)`.
    pub fn new(n: usize, edge_list: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n < 1 {
            return Err(Error::TooFewVertices { n, min: 1 });
        }
        let mut set = BTreeSet::new();
        for (i, j) in edge_list {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::VertexOutOfRange { index, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            set.insert((i.min(j), i.max(j)));
        }
        let edges: Vec<Edge> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self { n, edges, adjacency })
    }

    /// The graph with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))))
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Canonically oriented edges `(i, j)`, `i < j`, in sorted order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted neighbor list of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_index(i, j).is_some()
    }

    /// Position of `{i, j}` in [`Graph::edges`].
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n
    }

    pub fn oriented(&self) -> OrientedGraph {
        OrientedGraph { n: self.n, arcs: self.edges.clone() }
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { index: v, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// An undirected graph together with one direction per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedGraph {
    n: usize,
    arcs: Vec<Edge>,
}

impl OrientedGraph {
    /// Orientation given explicitly; every edge of `g` must appear exactly
    /// once, in either direction.
    pub fn with_orientation(g: &Graph, arcs: Vec<Edge>) -> Result<Self> {
        if arcs.len() != g.m() {
            return Err(Error::BadOrientation(format!(
                "{} arcs for {} edges",
                arcs.len(),
                g.m()
            )));
        }
        let mut seen = vec![false; g.m()];
        for &(i, j) in &arcs {
            let k = g.edge_index(i, j).ok_or(Error::MissingEdge(i, j))?;
            if seen[k] {
                return Err(Error::BadOrientation(format!("edge ({i}, {j}) oriented twice")));
            }
            seen[k] = true;
        }
        Ok(Self { n: g.n(), arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Edge] {
        &self.arcs
    }

    /// `m x n` incidence matrix: row `k` has `-1` at the tail and `+1` at the
    /// head of arc `k`, so `e = (H ⊗ I_d) p`.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.arcs.len(), self.n);
        for (k, &(i, j)) in self.arcs.iter().enumerate() {
            h[(k, i)] = -1.0;
            h[(k, j)] = 1.0;
        }
        h
    }
}

/// Outcome of a Laman test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LamanCheck {
    pub is_laman: bool,
    pub edge_count: usize,
    pub required_edges: usize,
    /// A vertex subset of size `k >= 2` spanning more than `2k - 3` edges,
    /// when one exists.
    pub violating_subset: Option<Vec<usize>>,
}

/// Vertex-count limit for the exhaustive subset test.
pub const EXHAUSTIVE_LAMAN_LIMIT: usize = 16;

/// Laman test: `m = 2n - 3` and every `k`-subset (`k >= 2`) spans at most
/// `2k - 3` edges. Exhaustive up to [`EXHAUSTIVE_LAMAN_LIMIT`] vertices,
/// pebble game above.
pub fn is_laman(g: &Graph) -> Result<LamanCheck> {
    if g.n() < 2 {
        return Err(Error::TooFewVertices { n: g.n(), min: 2 });
    }
    if g.n() <= EXHAUSTIVE_LAMAN_LIMIT {
        Ok(laman_exhaustive(g))
    } else {
        Ok(laman_pebble_game(g))
    }
}

/// Subset enumeration. Reports a smallest violating subset.
///
/// # Panics
///
/// If `g` has more than 31 vertices.
pub fn laman_exhaustive(g: &Graph) -> LamanCheck {
    let n = g.n();
    assert!(n < 32, "exhaustive Laman test limited to 31 vertices");
    let edge_masks: Vec<u32> = g.edges().iter().map(|&(i, j)| (1 << i) | (1 << j)).collect();
    let mut best: Option<u32> = None;
    for mask in 1u32..(1u32 << n) {
        let k = mask.count_ones() as usize;
        if k < 2 || best.is_some_and(|b| b.count_ones() as usize <= k) {
            continue;
        }
        let spanned = edge_masks.iter().filter(|&&em| mask & em == em).count();
        if spanned + 3 > 2 * k {
            best = Some(mask);
        }
    }
    let violating_subset = best.map(|mask| (0..n).filter(|&v| mask & (1 << v) != 0).collect());
    finish_check(g, violating_subset)
}

/// (2,3)-pebble game. On failure the certificate is the set searched when
/// the rejected edge could not collect four pebbles.
pub fn laman_pebble_game(g: &Graph) -> LamanCheck {
    let mut game = PebbleGame::new(g.n());
    let mut violating_subset = None;
    for &(u, v) in g.edges() {
        if let Err(cert) = game.insert(u, v) {
            violating_subset = Some(cert);
            break;
        }
    }
    finish_check(g, violating_subset)
}

fn finish_check(g: &Graph, violating_subset: Option<Vec<usize>>) -> LamanCheck {
    let required_edges = 2 * g.n() - 3;
    LamanCheck {
        is_laman: violating_subset.is_none() && g.m() == required_edges,
        edge_count: g.m(),
        required_edges,
        violating_subset,
    }
}

struct PebbleGame {
    pebbles: Vec<u8>,
    out: Vec<Vec<usize>>,
}

impl PebbleGame {
    fn new(n: usize) -> Self {
        Self { pebbles: vec![2; n], out: vec![Vec::new(); n] }
    }

    fn insert(&mut self, u: usize, v: usize) -> std::result::Result<(), Vec<usize>> {
        loop {
            let (root, blocked) = if self.pebbles[u] < 2 {
                (u, v)
            } else if self.pebbles[v] < 2 {
                (v, u)
            } else {
                break;
            };
            if let Err(searched) = self.gather(root, blocked) {
                return Err(searched);
            }
        }
        self.out[u].push(v);
        self.pebbles[u] -= 1;
        Ok(())
    }

    /// Moves one free pebble to `root` by reversing a directed path, never
    /// touching `blocked`. Returns the searched vertex set on failure.
    fn gather(&mut self, root: usize, blocked: usize) -> std::result::Result<(), Vec<usize>> {
        let n = self.pebbles.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        seen[blocked] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for idx in 0..self.out[x].len() {
                let y = self.out[x][idx];
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                parent[y] = x;
                if self.pebbles[y] > 0 {
                    self.pebbles[y] -= 1;
                    let mut c = y;
                    while c != root {
                        let p = parent[c];
                        let pos = self.out[p].iter().position(|&z| z == c).expect("tree edge");
                        self.out[p].swap_remove(pos);
                        self.out[c].push(p);
                        c = p;
                    }
                    self.pebbles[root] += 1;
                    return Ok(());
                }
                stack.push(y);
            }
        }
        Err((0..n).filter(|&z| seen[z]).collect())
    }
}

/// One Henneberg step applied to a graph with `n` vertices; the new vertex
/// is always `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum HennebergStep {
    VertexAddition { i: usize, j: usize },
    EdgeSplitting { i: usize, j: usize, k: usize },
}

impl HennebergStep {
    pub fn apply(&self, g: &Graph) -> Result<Graph> {
        match *self {
            HennebergStep::VertexAddition { i, j } => henneberg_vertex_addition(g, i, j),
            HennebergStep::EdgeSplitting { i, j, k } => henneberg_edge_splitting(g, i, j, k),
        }
    }

    /// Existing vertices the new vertex attaches to.
    pub fn attachments(&self) -> Vec<usize> {
        match *self {
            HennebergStep::VertexAddition { i, j } => vec![i, j],
            HennebergStep::EdgeSplitting { i, j, k } => vec![i, j, k],
        }
    }
}

/// Adds vertex `n` joined to `i` and `j`.
pub fn henneberg_vertex_addition(g: &Graph, i: usize, j: usize) -> Result<Graph> {
    g.check_vertex(i)?;
    g.check_vertex(j)?;
    if i == j {
        return Err(Error::RepeatedVertex(vec![i, j]));
    }
    let v = g.n();
    Graph::new(v + 1, g.edges().iter().copied().chain([(i, v), (j, v)]))
}

/// Adds vertex `n` joined to `i`, `j`, `k` and deletes edge `{i, j}`.
pub fn henneberg_edge_splitting(g: &Graph, i: usize, j: usize, k: usize) -> Result<Graph> {
    for x in [i, j, k] {
        g.check_vertex(x)?;
    }
    if !g.has_edge(i, j) {
        return Err(Error::MissingEdge(i, j));
    }
    if k == i || k == j {
        return Err(Error::RepeatedVertex(vec![i, j, k]));
    }
    let v = g.n();
    let removed = (i.min(j), i.max(j));
    Graph::new(
        v + 1,
        g.edges()
            .iter()
            .copied()
            .filter(|&e| e != removed)
            .chain([(i, v), (j, v), (k, v)]),
    )
}

/// Random Henneberg sequence from a single edge up to `n` vertices. Each
/// step picks vertex addition or edge splitting with equal probability
/// (vertex addition only while splitting is impossible) and chooses the
/// attachment vertices uniformly.
pub fn random_henneberg<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(Graph, Vec<HennebergStep>)> {
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let mut g = Graph::new(2, [(0, 1)])?;
    let mut steps = Vec::with_capacity(n - 2);
    while g.n() < n {
        let v = g.n();
        let step = if v >= 3 && rng.gen_bool(0.5) {
            let (i, j) = g.edges()[rng.gen_range(0..g.m())];
            let mut k = rng.gen_range(0..v - 2);
            for x in [i.min(j), i.max(j)] {
                if k >= x {
                    k += 1;
                }
            }
            HennebergStep::EdgeSplitting { i, j, k }
        } else {
            let i = rng.gen_range(0..v);
            let mut j = rng.gen_range(0..v - 1);
            if j >= i {
                j += 1;
            }
            HennebergStep::VertexAddition { i, j }
        };
        g = step.apply(&g)?;
        steps.push(step);
    }
    Ok((g, steps))
}

/// Adds every missing edge between anchor pairs.
pub fn augment_anchors(g: &Graph, anchors: &[usize]) -> Result<Graph> {
    let set: BTreeSet<usize> = anchors.iter().copied().collect();
    if set.len() < 2 {
        return Err(Error::TooFewAnchors { got: set.len(), min: 2 });
    }
    for &a in &set {
        g.check_vertex(a)?;
    }
    let list: Vec<usize> = set.into_iter().collect();
    let clique = list
        .iter()
        .enumerate()
        .flat_map(|(x, &a)| list[x + 1..].iter().map(move |&b| (a, b)));
    Graph::new(g.n(), g.edges().iter().copied().chain(clique))
}
