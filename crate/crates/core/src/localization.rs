//! Bearing-based network localization.
//!
//! A subset of nodes (anchors) knows its positions; every other node
//! (follower) is located from the anchor positions and the bearings
//! measured along the edges.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, HennebergStep};
use crate::linalg::{block_indices, select, spd_condition, Spectrum};
use crate::rigidity::{bearing_laplacian_from, Network};
use crate::sim::{integrate, random_configuration_with, Event, SimConfig, System, Trajectory};
use crate::weights::EdgeProjections;
use crate::{EPS_DIST, RANK_TOL};

/// A graph with anchor positions and measured bearings.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredNetwork {
    graph: Graph,
    dim: usize,
    anchors: Vec<usize>,
    followers: Vec<usize>,
    anchor_positions: DVector<f64>,
    bearings: Vec<DVector<f64>>,
    truth: Option<DVector<f64>>,
}

impl AnchoredNetwork {
    /// Bearings measured exactly from the configuration of `net`, which also
    /// serves as ground truth.
    pub fn from_network(net: &Network, anchors: &[usize]) -> Result<Self> {
        let anchors = sorted_unique(anchors, net.n())?;
        let anchor_positions =
            DVector::from_iterator(anchors.len() * net.dim(), anchors.iter().flat_map(|&a| net.position(a).to_vec()));
        let mut an = Self::with_bearings(
            net.graph().clone(),
            net.dim(),
            &anchors,
            anchor_positions,
            net.bearings(),
        )?;
        an.truth = Some(net.positions().clone());
        Ok(an)
    }

    /// Externally supplied bearings, one per canonical edge `i -> j`, `i < j`.
    /// No ground truth is known. Bearings are renormalized.
    pub fn with_bearings(
        graph: Graph,
        dim: usize,
        anchors: &[usize],
        anchor_positions: DVector<f64>,
        bearings: Vec<DVector<f64>>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        let anchors = sorted_unique(anchors, graph.n())?;
        if anchor_positions.len() != anchors.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: anchors.len() * dim,
                got: anchor_positions.len(),
            });
        }
        if bearings.len() != graph.m() {
            return Err(Error::DimensionMismatch { expected: graph.m(), got: bearings.len() });
        }
        let mut unit = Vec::with_capacity(bearings.len());
        for (g, &(i, j)) in bearings.into_iter().zip(graph.edges()) {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
            }
            let norm = g.norm();
            if !(norm > EPS_DIST) || !norm.is_finite() {
                return Err(Error::InvalidBearing { i, j, reason: format!("norm {norm}") });
            }
            unit.push(g / norm);
        }
        let followers = (0..graph.n()).filter(|v| anchors.binary_search(v).is_err()).collect();
        Ok(Self {
            graph,
            dim,
            anchors,
            followers,
            anchor_positions,
            bearings: unit,
            truth: None,
        })
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

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    pub fn followers(&self) -> &[usize] {
        &self.followers
    }

    pub fn anchor_positions(&self) -> &DVector<f64> {
        &self.anchor_positions
    }

    /// Measured bearing `g_ij` of canonical edge `k`.
    pub fn bearings(&self) -> &[DVector<f64>] {
        &self.bearings
    }

    pub fn truth(&self) -> Option<&DVector<f64>> {
        self.truth.as_ref()
    }

    /// Attaches full-length true positions, used only for error metrics.
    pub fn with_truth(mut self, truth: DVector<f64>) -> Result<Self> {
        let expected = self.dim * self.n();
        if truth.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: truth.len() });
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        bearing_laplacian_from(&self.graph, self.dim, &self.bearings)
    }

    /// Full configuration from follower-stacked estimates and the anchors.
    pub fn assemble(&self, followers: &[f64]) -> DVector<f64> {
        let d = self.dim;
        let mut p = DVector::zeros(d * self.n());
        for (k, &a) in self.anchors.iter().enumerate() {
            p.rows_mut(a * d, d).copy_from(&self.anchor_positions.rows(k * d, d));
        }
        for (k, &f) in self.followers.iter().enumerate() {
            p.rows_mut(f * d, d).copy_from_slice(&followers[k * d..(k + 1) * d]);
        }
        p
    }

    /// Follower blocks of a full configuration, in follower order.
    pub fn follower_part(&self, p: &DVector<f64>) -> DVector<f64> {
        let idx = block_indices(&self.followers, self.dim);
        DVector::from_iterator(idx.len(), idx.iter().map(|&r| p[r]))
    }
}

fn sorted_unique(nodes: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = nodes.to_vec();
    v.sort_unstable();
    for w in v.windows(2) {
        if w[0] == w[1] {
            return Err(Error::RepeatedVertex(vec![w[0]]));
        }
    }
    if let Some(&index) = v.iter().find(|&&a| a >= n) {
        return Err(Error::VertexOutOfRange { index, n });
    }
    Ok(v)
}

/// Blocks of the bearing Laplacian, anchors first.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianPartition {
    pub aa: DMatrix<f64>,
    pub af: DMatrix<f64>,
    pub fa: DMatrix<f64>,
    pub ff: DMatrix<f64>,
}

impl LaplacianPartition {
    pub fn of(l: &DMatrix<f64>, d: usize, anchors: &[usize], followers: &[usize]) -> Self {
        let a = block_indices(anchors, d);
        let f = block_indices(followers, d);
        Self {
            aa: select(l, &a, &a),
            af: select(l, &a, &f),
            fa: select(l, &f, &a),
            ff: select(l, &f, &f),
        }
    }
}

pub fn partition_laplacian(an: &AnchoredNetwork) -> Result<LaplacianPartition> {
    if an.anchors.is_empty() {
        return Err(Error::TooFewAnchors { got: 0, min: 1 });
    }
    Ok(LaplacianPartition::of(&an.laplacian(), an.dim, &an.anchors, &an.followers))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizabilityReport {
    pub localizable: bool,
    pub anchors: usize,
    pub followers: usize,
    /// Extreme singular values of `L_ff`; absent without followers.
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub threshold: f64,
    pub laplacian_rank: usize,
    pub laplacian_nullity: usize,
    /// Necessary condition `n_a >= dim Null(L) / d`.
    pub anchor_bound: f64,
    pub anchor_bound_met: bool,
    /// A nonzero infinitesimal bearing motion that leaves every anchor
    /// fixed, full-length and unit-norm. Present exactly when not
    /// localizable.
    pub follower_motion: Option<Vec<f64>>,
}

/// Localizable iff `L_ff` is nonsingular.
pub fn is_bearing_localizable(an: &AnchoredNetwork) -> LocalizabilityReport {
    let d = an.dim;
    let l = an.laplacian();
    let laplacian_rank = Spectrum::of(&l).rank(RANK_TOL);
    let laplacian_nullity = l.ncols() - laplacian_rank;
    let anchor_bound = laplacian_nullity as f64 / d as f64;
    let mut report = LocalizabilityReport {
        localizable: true,
        anchors: an.anchors.len(),
        followers: an.followers.len(),
        sigma_min: None,
        sigma_max: None,
        threshold: 0.0,
        laplacian_rank,
        laplacian_nullity,
        anchor_bound,
        anchor_bound_met: an.anchors.len() as f64 >= anchor_bound,
        follower_motion: None,
    };
    if an.followers.is_empty() {
        return report;
    }
    let ff = LaplacianPartition::of(&l, d, &an.anchors, &an.followers).ff;
    let spectrum = Spectrum::of(&ff);
    let sigma_max = spectrum.max();
    let sigma_min = *spectrum.singular_values.last().unwrap();
    report.sigma_min = Some(sigma_min);
    report.sigma_max = Some(sigma_max);
    report.threshold = RANK_TOL * sigma_max;
    report.localizable = sigma_max > 0.0 && sigma_min > report.threshold;
    if !report.localizable {
        let v = spectrum.right.column(spectrum.right.ncols() - 1);
        let mut motion = vec![0.0; d * an.n()];
        for (k, &f) in an.followers.iter().enumerate() {
            for c in 0..d {
                motion[f * d + c] = v[k * d + c];
            }
        }
        report.follower_motion = Some(motion);
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationSolution {
    /// Full configuration with anchors at their known positions.
    pub positions: Vec<f64>,
    /// Spectral condition number of `L_ff`.
    pub condition: f64,
    /// Least-squares objective at the solution; zero for consistent
    /// bearings.
    pub objective: f64,
}

/// Closed-form least-squares estimate `p_f = -L_ff^{-1} L_fa p_a`.
pub fn solve_localization(an: &AnchoredNetwork) -> Result<LocalizationSolution> {
    if an.followers.is_empty() {
        return Err(Error::NoFollowers);
    }
    let report = is_bearing_localizable(an);
    let not_localizable = || Error::NotLocalizable {
        sigma_min: report.sigma_min.unwrap_or(0.0),
        threshold: report.threshold,
    };
    if !report.localizable {
        return Err(not_localizable());
    }
    let part = partition_laplacian(an)?;
    let chol = Cholesky::new(part.ff.clone()).ok_or_else(not_localizable)?;
    let rhs = -(&part.fa * &an.anchor_positions);
    let pf = chol.solve(&rhs);
    let positions = an.assemble(pf.as_slice());
    Ok(LocalizationSolution {
        objective: localization_objective(an, &positions),
        positions: positions.iter().copied().collect(),
        condition: spd_condition(&part.ff),
    })
}

/// `J = sum over edges |P_{g_ij} (p_i - p_j)|^2` for a full estimate.
pub fn localization_objective(an: &AnchoredNetwork, estimate: &DVector<f64>) -> f64 {
    let d = an.dim;
    an.graph
        .edges()
        .iter()
        .zip(&an.bearings)
        .map(|(&(i, j), g)| {
            let diff = estimate.rows(i * d, d) - estimate.rows(j * d, d);
            (&diff - g * g.dot(&diff)).norm_squared()
        })
        .sum()
}

/// Follower-stacked `-sum_j P_{g_ij} (p_i - p_j)` for a full estimate.
pub fn localization_protocol_field(an: &AnchoredNetwork, estimate: &DVector<f64>) -> DVector<f64> {
    let d = an.dim;
    let mut out = DVector::zeros(d * an.followers.len());
    for (k, &i) in an.followers.iter().enumerate() {
        let pi = estimate.rows(i * d, d);
        let mut acc = DVector::zeros(d);
        for &j in an.graph.neighbors(i) {
            let e = an.graph.edge_index(i, j).expect("neighbor implies edge");
            let g = &an.bearings[e];
            let diff = pi - estimate.rows(j * d, d);
            acc -= &diff - g * g.dot(&diff);
        }
        out.rows_mut(k * d, d).copy_from(&acc);
    }
    out
}

/// The localization protocol as a dynamical system on follower estimates.
pub struct LocalizationSystem<'a> {
    an: &'a AnchoredNetwork,
    weights: EdgeProjections,
}

impl<'a> LocalizationSystem<'a> {
    pub fn new(an: &'a AnchoredNetwork) -> Self {
        Self { an, weights: EdgeProjections::new(&an.graph, an.dim, &an.bearings) }
    }
}

impl System for LocalizationSystem<'_> {
    fn dim(&self) -> usize {
        self.an.dim * self.an.followers.len()
    }

    fn derivative(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> std::result::Result<(), Event> {
        let d = self.an.dim;
        let p = self.an.assemble(x);
        let mut lp = vec![0.0; p.len()];
        self.weights.laplacian_apply(p.as_slice(), &mut lp);
        for (k, &f) in self.an.followers.iter().enumerate() {
            for c in 0..d {
                dx[k * d + c] = -lp[f * d + c];
            }
        }
        Ok(())
    }

    fn state_names(&self) -> Vec<String> {
        self.an
            .followers
            .iter()
            .flat_map(|&f| axis_labels(self.an.dim).map(move |a| format!("p{}_{a}", f + 1)))
            .collect()
    }

    fn metric_names(&self) -> Vec<String> {
        let mut names = vec!["objective".to_string()];
        if self.an.truth.is_some() {
            names.push("max_error".into());
            names.extend(self.an.followers.iter().map(|f| format!("error{}", f + 1)));
        }
        names
    }

    fn metrics(&self, _t: f64, x: &[f64]) -> Vec<f64> {
        let p = self.an.assemble(x);
        let mut out = vec![localization_objective(self.an, &p)];
        if let Some(truth) = &self.an.truth {
            let d = self.an.dim;
            let errors: Vec<f64> = self
                .an
                .followers
                .iter()
                .map(|&f| (p.rows(f * d, d) - truth.rows(f * d, d)).norm())
                .collect();
            out.push(errors.iter().cloned().fold(0.0, f64::max));
            out.extend(errors);
        }
        out
    }
}

pub(crate) fn axis_labels(d: usize) -> impl Iterator<Item = String> + Clone {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    (0..d).map(|c| NAMES.get(c).map_or_else(|| format!("c{c}"), |s| s.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationRun {
    pub localizable: bool,
    pub trajectory: Trajectory,
}

/// Integrates the protocol from follower-stacked `initial` estimates.
///
/// Non-localizable networks are simulated too; the estimates then settle
/// on a point that differs from the truth along `Null(L_ff)`.
pub fn simulate_localization(
    an: &AnchoredNetwork,
    initial: &[f64],
    cfg: &SimConfig,
) -> Result<LocalizationRun> {
    if an.followers.is_empty() {
        return Err(Error::NoFollowers);
    }
    let localizable = is_bearing_localizable(an).localizable;
    let trajectory = integrate(&LocalizationSystem::new(an), initial, cfg)?;
    Ok(LocalizationRun { localizable, trajectory })
}

/// Follower-stacked estimates drawn uniformly from `[lo, hi)^d`.
pub fn random_initial_guess(an: &AnchoredNetwork, bounds: (f64, f64), seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_configuration_with(&mut rng, an.followers.len(), an.dim, bounds, None)
}

/// A Henneberg-built, well-conditioned localization benchmark.
///
/// The `d + 1` anchors sit at `0` and `2 e_k`. Every follower is added by
/// vertex addition onto two random anchors `a`, `b` and placed on the sphere
/// with diameter `ab`, so it sees them at a right angle. The result is
/// infinitesimally bearing rigid and every follower block of `L_ff` has
/// smallest eigenvalue 1.
pub fn right_angle_network(n: usize, d: usize, seed: u64) -> Result<(Network, Vec<usize>, Vec<HennebergStep>)> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let na = d + 1;
    if n < na + 1 {
        return Err(Error::TooFewVertices { n, min: na + 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(2, [(0, 1)])?;
    let mut steps = Vec::new();
    let mut points: Vec<DVector<f64>> = vec![DVector::zeros(d)];
    for k in 1..=d {
        let mut p = DVector::zeros(d);
        p[k - 1] = 2.0;
        points.push(p);
    }
    for k in 2..na {
        let step = HennebergStep::VertexAddition { i: 0, j: k - 1 };
        g = step.apply(&g)?;
        steps.push(step);
    }
    while g.n() < n {
        let a = rng.gen_range(0..na);
        let mut b = rng.gen_range(0..na - 1);
        if b >= a {
            b += 1;
        }
        let axis = &points[b] - &points[a];
        let u = loop {
            let r = DVector::from_fn(d, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let perp = &r - &axis * (axis.dot(&r) / axis.norm_squared());
            if perp.norm() > 1e-3 {
                break perp.normalize();
            }
        };
        points.push((&points[a] + &points[b]) * 0.5 + u * (axis.norm() * 0.5));
        let step = HennebergStep::VertexAddition { i: a, j: b };
        g = step.apply(&g)?;
        steps.push(step);
    }
    let flat: Vec<f64> = points.iter().flat_map(|p| p.iter().copied()).collect();
    let net = Network::new(g, d, DVector::from_vec(flat))?;
    Ok((net, (0..na).collect(), steps))
}
