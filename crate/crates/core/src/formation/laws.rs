//! Control laws as pure functions of the current multi-agent state.
//!
//! Positions, velocities and accelerations are full stacked vectors of
//! length `d n`. Bearing-based laws return follower-stacked outputs (in
//! [`TargetFormation::followers`] order); bearing-only laws return one block
//! per agent.

use nalgebra::{DMatrix, DVector};

use super::target::{Gains, TargetFormation};
use crate::error::{Error, Result};
use crate::EPS_DIST;

fn block(v: &DVector<f64>, i: usize, d: usize) -> DVector<f64> {
    v.rows(i * d, d).into_owned()
}

/// `sum_j P_{g*_ij} (x_i - x_j)` for every follower `i`.
fn follower_sums(tf: &TargetFormation, x: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = tf.dim();
    tf.followers()
        .iter()
        .map(|&i| {
            let mut acc = DVector::zeros(d);
            for &j in tf.graph().neighbors(i) {
                let g = tf.desired_bearing(i, j).expect("neighbor implies edge");
                let diff = block(x, i, d) - block(x, j, d);
                acc += &diff - &g * g.dot(&diff);
            }
            acc
        })
        .collect()
}

fn stack(blocks: &[DVector<f64>], d: usize) -> DVector<f64> {
    DVector::from_iterator(blocks.len() * d, blocks.iter().flat_map(|b| b.iter().copied()))
}

/// `p_i' = -sum_j P_{g*_ij} (p_i - p_j)`.
pub fn si_stabilization_field(tf: &TargetFormation, p: &DVector<f64>) -> DVector<f64> {
    -stack(&follower_sums(tf, p), tf.dim())
}

/// Proportional-integral law. Returns `(p_f', xi')` where `xi` holds one
/// integral state per follower:
///
/// `p_i' = -k_p s_i - k_I xi_i`, `xi_i' = s_i`,
/// `s_i = sum_j P_{g*_ij} (p_i - p_j)`.
pub fn si_pi_field(
    tf: &TargetFormation,
    p: &DVector<f64>,
    xi: &DVector<f64>,
    gains: &Gains,
) -> (DVector<f64>, DVector<f64>) {
    let s = stack(&follower_sums(tf, p), tf.dim());
    (-(&s * gains.kp) - xi * gains.ki, s)
}

/// `p_i' = -K_i^{-1} sum_j P_{g*_ij} [k_p (p_i - p_j) - p_j']` with the
/// neighbors' velocities taken from `velocities`.
pub fn si_velocity_feedback_field(
    tf: &TargetFormation,
    p: &DVector<f64>,
    velocities: &DVector<f64>,
    gains: &Gains,
) -> Result<DVector<f64>> {
    let d = tf.dim();
    let mut out = Vec::with_capacity(tf.followers().len());
    for &i in tf.followers() {
        let mut rhs = DVector::zeros(d);
        for &j in tf.graph().neighbors(i) {
            let g = tf.desired_bearing(i, j).expect("neighbor implies edge");
            let term = (block(p, i, d) - block(p, j, d)) * gains.kp - block(velocities, j, d);
            rhs -= &term - &g * g.dot(&term);
        }
        out.push(solve_gain(tf, i, rhs)?);
    }
    Ok(stack(&out, d))
}

/// `v_i' = -sum_j P_{g*_ij} [k_p (p_i - p_j) + k_v (v_i - v_j)]`.
pub fn di_field(
    tf: &TargetFormation,
    p: &DVector<f64>,
    v: &DVector<f64>,
    gains: &Gains,
) -> DVector<f64> {
    let d = tf.dim();
    let sp = stack(&follower_sums(tf, p), d);
    let sv = stack(&follower_sums(tf, v), d);
    -(sp * gains.kp + sv * gains.kv)
}

/// `v_i' = K_i^{-1} sum_j P_{g*_ij} [-k_p (p_i - p_j) - k_v (v_i - v_j) + v_j']`
/// with the neighbors' accelerations taken from `accelerations`.
pub fn di_acceleration_feedback_field(
    tf: &TargetFormation,
    p: &DVector<f64>,
    v: &DVector<f64>,
    accelerations: &DVector<f64>,
    gains: &Gains,
) -> Result<DVector<f64>> {
    let d = tf.dim();
    let mut out = Vec::with_capacity(tf.followers().len());
    for &i in tf.followers() {
        let mut rhs = DVector::zeros(d);
        for &j in tf.graph().neighbors(i) {
            let g = tf.desired_bearing(i, j).expect("neighbor implies edge");
            let term = -(block(p, i, d) - block(p, j, d)) * gains.kp
                - (block(v, i, d) - block(v, j, d)) * gains.kv
                + block(accelerations, j, d);
            rhs += &term - &g * g.dot(&term);
        }
        out.push(solve_gain(tf, i, rhs)?);
    }
    Ok(stack(&out, d))
}

fn solve_gain(tf: &TargetFormation, i: usize, rhs: DVector<f64>) -> Result<DVector<f64>> {
    let k: DMatrix<f64> = tf.gain_matrix(i);
    let lu = k.clone().lu();
    // A d x d symmetric PSD matrix; compare its extreme eigenvalues.
    let eig = k.symmetric_eigen().eigenvalues;
    if !(eig.min() > crate::RANK_TOL * eig.max()) {
        return Err(Error::SingularGain { follower: i });
    }
    lu.solve(&rhs).ok_or(Error::SingularGain { follower: i })
}

/// Unicycle law for every agent: `(v_i, w_i)` with
/// `v_i = [cos th_i, sin th_i] s_i`, `w_i = [-sin th_i, cos th_i] s_i`,
/// `s_i = sum_j P_{g*_ij} (p_j - p_i)`.
pub fn unicycle_field(
    tf: &TargetFormation,
    p: &DVector<f64>,
    theta: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if tf.dim() != 2 {
        return Err(Error::Unsupported(format!("unicycle agents need d = 2, got {}", tf.dim())));
    }
    if theta.len() != tf.n() {
        return Err(Error::DimensionMismatch { expected: tf.n(), got: theta.len() });
    }
    let mut v = Vec::with_capacity(tf.n());
    let mut w = Vec::with_capacity(tf.n());
    for i in 0..tf.n() {
        let mut s = DVector::zeros(2);
        for &j in tf.graph().neighbors(i) {
            let g = tf.desired_bearing(i, j).expect("neighbor implies edge");
            let diff = block(p, j, 2) - block(p, i, 2);
            s += &diff - &g * g.dot(&diff);
        }
        let (sn, cs) = theta[i].sin_cos();
        v.push(cs * s[0] + sn * s[1]);
        w.push(-sn * s[0] + cs * s[1]);
    }
    Ok((v, w))
}

/// Current bearing `g_ij` and distance, or a collocation error.
pub(crate) fn current_bearing(p: &DVector<f64>, i: usize, j: usize, d: usize) -> Result<(DVector<f64>, f64)> {
    let e = block(p, j, d) - block(p, i, d);
    let len = e.norm();
    if !(len > EPS_DIST) {
        return Err(Error::Collocated { i: i.min(j), j: i.max(j) });
    }
    Ok((e / len, len))
}

/// Per-agent sum over neighbors of `term(g_ij, g*_ij, |e_ij|)`.
fn bearing_sum(
    tf: &TargetFormation,
    p: &DVector<f64>,
    term: impl Fn(&DVector<f64>, &DVector<f64>, f64) -> DVector<f64>,
) -> Result<DVector<f64>> {
    let d = tf.dim();
    let mut out = DVector::zeros(d * tf.n());
    for i in 0..tf.n() {
        let mut acc = DVector::zeros(d);
        for &j in tf.graph().neighbors(i) {
            let (g, len) = current_bearing(p, i, j, d)?;
            let gs = tf.desired_bearing(i, j).expect("neighbor implies edge");
            acc += term(&g, &gs, len);
        }
        out.rows_mut(i * d, d).copy_from(&acc);
    }
    Ok(out)
}

/// Bearing-only law `p_i' = -sum_j P_{g_ij} g*_ij`.
pub fn bearing_only_field(tf: &TargetFormation, p: &DVector<f64>) -> Result<DVector<f64>> {
    bearing_sum(tf, p, |g, gs, _| -(gs - g * g.dot(gs)))
}

/// Gradient law `p_i' = -sum_j P_{g_ij} g*_ij / |e_ij|`.
pub fn bearing_gradient_field(tf: &TargetFormation, p: &DVector<f64>) -> Result<DVector<f64>> {
    bearing_sum(tf, p, |g, gs, len| -(gs - g * g.dot(gs)) / len)
}

/// Bearing-only law `p_i' = sum_j (g_ij - g*_ij)`.
pub fn bearing_only_descent_field(tf: &TargetFormation, p: &DVector<f64>) -> Result<DVector<f64>> {
    bearing_sum(tf, p, |g, gs, _| g - gs)
}
