#![allow(dead_code)]

use bearing_core::graph::random_henneberg;
use bearing_core::sim::random_configuration_with;
use bearing_core::{Graph, Network};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random configuration in `[0, 1]^d` on a random Henneberg graph.
pub fn laman_network(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Network {
    let (g, _) = random_henneberg(n, rng).unwrap();
    let p = random_configuration_with(rng, n, d, (0.0, 1.0), Some(&g));
    Network::new(g, d, p).unwrap()
}

/// Random graph with exactly `m` edges.
pub fn random_graph(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut all: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    all.shuffle(rng);
    Graph::new(n, all.into_iter().take(m)).unwrap()
}

pub fn random_network_on(g: Graph, d: usize, rng: &mut ChaCha8Rng) -> Network {
    let p = random_configuration_with(rng, g.n(), d, (0.0, 1.0), Some(&g));
    Network::new(g, d, p).unwrap()
}

pub fn unit_vector(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Central-difference Jacobian.
pub fn fd_jacobian(f: impl Fn(&DVector<f64>) -> DVector<f64>, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let rows = f(x).len();
    let mut j = DMatrix::zeros(rows, x.len());
    for c in 0..x.len() {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[c] += h;
        minus[c] -= h;
        j.set_column(c, &((f(&plus) - f(&minus)) / (2.0 * h)));
    }
    j
}

/// Unit cube with its 12 edges and one diagonal on every face.
pub fn cube() -> Network {
    let corners: Vec<Vec<f64>> = (0..8)
        .map(|k| vec![(k & 1) as f64, ((k >> 1) & 1) as f64, ((k >> 2) & 1) as f64])
        .collect();
    let mut edges = Vec::new();
    for a in 0..8usize {
        for bit in 0..3 {
            let b = a ^ (1 << bit);
            if a < b {
                edges.push((a, b));
            }
        }
    }
    edges.extend([(0, 3), (4, 7), (0, 5), (2, 7), (0, 6), (1, 7)]);
    Network::from_points(Graph::new(8, edges).unwrap(), &corners).unwrap()
}

/// Two agents with a horizontal desired bearing.
pub fn pair() -> Network {
    Network::from_points(Graph::new(2, [(0, 1)]).unwrap(), &[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap()
}

/// Unit square with one diagonal.
pub fn braced_square() -> Network {
    Network::from_points(
        Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap(),
        &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
    )
    .unwrap()
}

/// Numerical rank with the crate's relative threshold.
pub fn rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-8 * max).count()
}

/// The `3 x 3 x 3` lattice built by vertex additions only, so the graph is
/// Laman. The unit cube at the origin is built first, then the outer shell,
/// and each node is joined to the two earlier nodes within distance `sqrt(2)`
/// whose bearings are closest to perpendicular.
pub fn lattice27() -> Network {
    let mut nodes: Vec<[i32; 3]> = Vec::new();
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                nodes.push([x, y, z]);
            }
        }
    }
    nodes.sort_by_key(|v| (*v.iter().max().unwrap(), v[0] + v[1] + v[2], *v));
    let diff = |a: [i32; 3], b: [i32; 3]| [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let dot = |a: [i32; 3], b: [i32; 3]| (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) as f64;
    let mut edges = vec![(0, 1)];
    for v in 2..nodes.len() {
        let near: Vec<usize> = (0..v).filter(|&u| dot(diff(nodes[v], nodes[u]), diff(nodes[v], nodes[u])) <= 2.0).collect();
        let mut best = None;
        let mut best_cos = f64::INFINITY;
        for (a, &u) in near.iter().enumerate() {
            for &w in &near[a + 1..] {
                let (eu, ew) = (diff(nodes[v], nodes[u]), diff(nodes[v], nodes[w]));
                let c = dot(eu, ew).abs() / (dot(eu, eu) * dot(ew, ew)).sqrt();
                if c < best_cos - 1e-12 {
                    best_cos = c;
                    best = Some((u, w));
                }
            }
        }
        let (u, w) = best.expect("every later node has two earlier neighbors");
        assert!(best_cos < 1.0 - 1e-9);
        edges.push((u, v));
        edges.push((w, v));
    }
    let points: Vec<Vec<f64>> = nodes.iter().map(|v| v.iter().map(|&c| c as f64).collect()).collect();
    Network::from_points(Graph::new(27, edges).unwrap(), &points).unwrap()
}
