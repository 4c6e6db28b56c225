//! Bearing rigidity of planar networks whose agents measure bearings in
//! their own body frames.

use nalgebra::{DMatrix, DVector};

use super::network::check_collocation;
use super::report::RigidityReport;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::linalg::orthonormal_basis;

/// Planar network with directed edges and a heading per agent.
///
/// Arc `(i, j)` means agent `i` measures the bearing of `j` in its own
/// frame. Both directions of a pair may be present.
#[derive(Debug, Clone, PartialEq)]
pub struct Se2Network {
    n: usize,
    arcs: Vec<Edge>,
    positions: DVector<f64>,
    headings: Vec<f64>,
}

impl Se2Network {
    pub fn new(n: usize, arcs: Vec<Edge>, positions: DVector<f64>, headings: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices { n, min: 2 });
        }
        if positions.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: positions.len() });
        }
        if headings.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: headings.len() });
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j) in &arcs {
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if let Some(&index) = [i, j].iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { index, n });
            }
            if !seen.insert((i, j)) {
                return Err(Error::BadOrientation(format!("arc ({i}, {j}) repeated")));
            }
        }
        let undirected = Graph::new(n, arcs.iter().copied())?;
        check_collocation(&undirected, 2, positions.as_slice())?;
        Ok(Self { n, arcs, positions, headings })
    }

    /// Both directions of every edge of `g`, in canonical edge order.
    pub fn bidirected(g: &Graph, positions: DVector<f64>, headings: Vec<f64>) -> Result<Self> {
        let arcs = g.edges().iter().flat_map(|&(i, j)| [(i, j), (j, i)]).collect();
        Self::new(g.n(), arcs, positions, headings)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Edge] {
        &self.arcs
    }

    pub fn positions(&self) -> &DVector<f64> {
        &self.positions
    }

    pub fn headings(&self) -> &[f64] {
        &self.headings
    }

    fn edge(&self, i: usize, j: usize) -> [f64; 2] {
        let p = &self.positions;
        [p[2 * j] - p[2 * i], p[2 * j + 1] - p[2 * i + 1]]
    }

    /// Stacked body-frame bearings `r_k = R(psi_i)^T g_k`, one block per arc.
    pub fn bearing_function(&self) -> DVector<f64> {
        let mut out = DVector::zeros(2 * self.arcs.len());
        for (k, &(i, j)) in self.arcs.iter().enumerate() {
            let [ex, ey] = self.edge(i, j);
            let len = ex.hypot(ey);
            let (s, c) = self.headings[i].sin_cos();
            out[2 * k] = (c * ex + s * ey) / len;
            out[2 * k + 1] = (-s * ex + c * ey) / len;
        }
        out
    }

    /// Jacobian of [`Self::bearing_function`] with respect to `(p, psi)`.
    ///
    /// Columns are the `2n` positions followed by the `n` headings.
    pub fn rigidity_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut r = DMatrix::zeros(2 * self.arcs.len(), 3 * n);
        for (k, &(i, j)) in self.arcs.iter().enumerate() {
            let [ex, ey] = self.edge(i, j);
            let len = ex.hypot(ey);
            let (gx, gy) = (ex / len, ey / len);
            let proj = [[1.0 - gx * gx, -gx * gy], [-gx * gy, 1.0 - gy * gy]];
            let (s, c) = self.headings[i].sin_cos();
            let rot_t = [[c, s], [-s, c]];
            for a in 0..2 {
                for b in 0..2 {
                    let v = (rot_t[a][0] * proj[0][b] + rot_t[a][1] * proj[1][b]) / len;
                    r[(2 * k + a, 2 * j + b)] = v;
                    r[(2 * k + a, 2 * i + b)] = -v;
                }
            }
            // d/dpsi of R^T g is [[0, 1], [-1, 0]] R^T g.
            let rx = c * gx + s * gy;
            let ry = -s * gx + c * gy;
            r[(2 * k, 2 * n + i)] = ry;
            r[(2 * k + 1, 2 * n + i)] = -rx;
        }
        r
    }

    /// Translations, scaling, and the coordinated rotation, as columns.
    pub fn trivial_motions(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut cols = vec![DVector::zeros(3 * n); 4];
        for i in 0..n {
            let (x, y) = (self.positions[2 * i], self.positions[2 * i + 1]);
            cols[0][2 * i] = 1.0;
            cols[1][2 * i + 1] = 1.0;
            cols[2][2 * i] = x;
            cols[2][2 * i + 1] = y;
            cols[3][2 * i] = -y;
            cols[3][2 * i + 1] = x;
            cols[3][2 * n + i] = 1.0;
        }
        DMatrix::from_columns(&cols)
    }
}

/// Rigid iff `rank(R_SE) = 3n - 4`.
pub fn is_se2_infinitesimally_rigid(net: &Se2Network) -> RigidityReport {
    let motions = net.trivial_motions();
    let columns: Vec<DVector<f64>> = motions.column_iter().map(|c| c.into_owned()).collect();
    let trivial = orthonormal_basis(&columns, 1e-10);
    RigidityReport::from_matrix(&net.rigidity_matrix(), 3 * net.n() - 4, &trivial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidity::Verdict;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn triangle() -> Se2Network {
        Se2Network::bidirected(
            &Graph::complete(3).unwrap(),
            DVector::from_vec(vec![0.1, -0.2, 1.3, 0.4, 0.2, 1.1]),
            vec![0.3, -1.2, 2.5],
        )
        .unwrap()
    }

    #[test]
    fn bearing_function_examples() {
        let pos = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        let net = Se2Network::new(2, vec![(0, 1)], pos.clone(), vec![0.0, 0.0]).unwrap();
        assert_relative_eq!(net.bearing_function(), DVector::from_vec(vec![1.0, 0.0]));
        let net = Se2Network::new(2, vec![(0, 1)], pos, vec![FRAC_PI_2, 0.0]).unwrap();
        assert_relative_eq!(
            net.bearing_function(),
            DVector::from_vec(vec![0.0, -1.0]),
            epsilon = 1e-15
        );
        let r = triangle().bearing_function();
        for k in 0..6 {
            assert_relative_eq!(r.rows(2 * k, 2).norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let net = triangle();
        let analytic = net.rigidity_matrix();
        let h = 1e-6;
        let n = net.n();
        for c in 0..3 * n {
            let shifted = |delta: f64| {
                let mut p = net.positions.clone();
                let mut psi = net.headings.clone();
                if c < 2 * n {
                    p[c] += delta;
                } else {
                    psi[c - 2 * n] += delta;
                }
                Se2Network::new(n, net.arcs.clone(), p, psi).unwrap().bearing_function()
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            assert!((fd - analytic.column(c)).norm() < 1e-8 * analytic.norm());
        }
    }

    #[test]
    fn trivial_motions_annihilated_and_triangle_rigid() {
        let net = triangle();
        assert!((net.rigidity_matrix() * net.trivial_motions()).norm() < 1e-12);
        let r = is_se2_infinitesimally_rigid(&net);
        assert_eq!(r.expected_rank, 5);
        assert_eq!(r.verdict, Verdict::Rigid);
    }

    #[test]
    fn coordinated_rotation_preserves_bearings() {
        let net = triangle();
        let delta: f64 = 0.7;
        let (s, c) = delta.sin_cos();
        let mut p = net.positions.clone();
        for i in 0..3 {
            let (x, y) = (p[2 * i], p[2 * i + 1]);
            p[2 * i] = c * x - s * y;
            p[2 * i + 1] = s * x + c * y;
        }
        let psi = net.headings.iter().map(|h| h + delta).collect();
        let rotated = Se2Network::new(3, net.arcs.clone(), p, psi).unwrap();
        assert_relative_eq!(rotated.bearing_function(), net.bearing_function(), epsilon = 1e-14);
    }

    #[test]
    fn two_agents_both_directions() {
        let net = Se2Network::bidirected(
            &Graph::new(2, [(0, 1)]).unwrap(),
            DVector::from_vec(vec![0.0, 0.0, 1.0, 0.5]),
            vec![0.2, 1.0],
        )
        .unwrap();
        let r = is_se2_infinitesimally_rigid(&net);
        assert!(r.rank <= 2);
        assert_eq!(r.rank, 2);
        assert_eq!(r.verdict, Verdict::Rigid);
    }

    #[test]
    fn validation() {
        let pos = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert!(Se2Network::new(2, vec![(0, 1), (0, 1)], pos.clone(), vec![0.0; 2]).is_err());
        assert!(Se2Network::new(2, vec![(0, 0)], pos.clone(), vec![0.0; 2]).is_err());
        assert!(Se2Network::new(2, vec![(0, 1)], pos, vec![0.0; 3]).is_err());
    }
}
