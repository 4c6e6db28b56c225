use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::leader::LeaderMotion;
use super::metrics::{bearing_error, centroid, phi1, phi2, scale};
use super::target::{Gains, TargetFormation};
use crate::error::{Error, Result};
use crate::linalg::Spectrum;
use crate::localization::axis_labels;
use crate::sim::{Event, System};
use crate::weights::EdgeProjections;
use crate::{EPS_DIST, RANK_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    /// Single integrators, proportional law.
    Si,
    /// Single integrators, proportional-integral law.
    SiPi,
    /// Single integrators with neighbor velocity feedback.
    SiVel,
    /// Double integrators, position and velocity feedback.
    Di,
    /// Double integrators with neighbor acceleration feedback.
    DiAcc,
    Unicycle,
    /// `p_i' = -sum P_{g_ij} g*_ij`.
    BearingOnly,
    /// `p_i' = -sum P_{g_ij} g*_ij / |e_ij|`.
    BearingGradient,
    /// `p_i' = sum (g_ij - g*_ij)`.
    BearingDescent,
}

impl Law {
    pub const ALL: [Law; 9] = [
        Law::Si,
        Law::SiPi,
        Law::SiVel,
        Law::Di,
        Law::DiAcc,
        Law::Unicycle,
        Law::BearingOnly,
        Law::BearingGradient,
        Law::BearingDescent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Si => "si",
            Law::SiPi => "si-pi",
            Law::SiVel => "si-vel",
            Law::Di => "di",
            Law::DiAcc => "di-acc",
            Law::Unicycle => "unicycle",
            Law::BearingOnly => "bearing-only",
            Law::BearingGradient => "bearing-gradient",
            Law::BearingDescent => "bearing-descent",
        }
    }

    /// Laws that need at least one leader; the others run without any.
    pub fn uses_leaders(self) -> bool {
        matches!(self, Law::Si | Law::SiPi | Law::SiVel | Law::Di | Law::DiAcc)
    }

    fn needs_solver(self) -> bool {
        matches!(self, Law::SiVel | Law::DiAcc)
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Law::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown law {s:?}")))
    }
}

/// A target formation driven by one control law, as an integrable system.
///
/// State layouts, with `P` the stacked positions of all agents:
///
/// | law | state |
/// |---|---|
/// | `si`, `si-vel`, bearing-only laws | `P` |
/// | `si-pi` | `P`, then one integral `d`-vector per follower |
/// | `di`, `di-acc` | `P`, then all velocities |
/// | `unicycle` | `P`, then all headings |
///
/// Leaders follow the prescribed [`LeaderMotion`]. With `si-vel` and
/// `di-acc` the followers' own velocities (accelerations) enter each
/// other's laws; that implicit system is solved exactly at every
/// evaluation, so each follower's law holds with its neighbors' actual
/// derivatives.
pub struct FormationSystem {
    tf: TargetFormation,
    law: Law,
    gains: Gains,
    motion: LeaderMotion,
    weights: EdgeProjections,
    solver: Option<Cholesky<f64, Dyn>>,
}

impl FormationSystem {
    pub fn new(tf: TargetFormation, law: Law, gains: Gains, motion: LeaderMotion) -> Result<Self> {
        gains.validate()?;
        motion.validate(tf.dim())?;
        if law.uses_leaders() && tf.leaders().is_empty() {
            return Err(Error::Unsupported(format!("law {law} needs at least one leader")));
        }
        if !law.uses_leaders() && !tf.leaders().is_empty() {
            return Err(Error::Unsupported(format!("law {law} runs without leaders")));
        }
        if law == Law::Unicycle && tf.dim() != 2 {
            return Err(Error::Unsupported(format!("unicycle agents need d = 2, got {}", tf.dim())));
        }
        if law.uses_leaders() && tf.followers().is_empty() {
            return Err(Error::NoFollowers);
        }
        let solver = if law.needs_solver() {
            tf.check_gain_matrices()?;
            let ff = tf.partition().ff;
            let spectrum = Spectrum::of(&ff);
            let threshold = RANK_TOL * spectrum.max();
            let sigma_min = *spectrum.singular_values.last().unwrap_or(&0.0);
            let singular = Error::NotLocalizable { sigma_min, threshold };
            if !(sigma_min > threshold) {
                return Err(singular);
            }
            Some(Cholesky::new(ff).ok_or(singular)?)
        } else {
            None
        };
        let weights = EdgeProjections::new(tf.graph(), tf.dim(), tf.desired());
        Ok(Self { tf, law, gains, motion, weights, solver })
    }

    pub fn target(&self) -> &TargetFormation {
        &self.tf
    }

    pub fn law(&self) -> Law {
        self.law
    }

    fn dn(&self) -> usize {
        self.tf.dim() * self.tf.n()
    }

    /// Builds the initial state from positions, plus headings for unicycles
    /// and velocities for double integrators (zero when omitted). Leader
    /// velocities always start at the prescribed value.
    pub fn initial_state(
        &self,
        positions: &DVector<f64>,
        headings: Option<&[f64]>,
        velocities: Option<&DVector<f64>>,
    ) -> Result<Vec<f64>> {
        let (d, n, dn) = (self.tf.dim(), self.tf.n(), self.dn());
        if positions.len() != dn {
            return Err(Error::DimensionMismatch { expected: dn, got: positions.len() });
        }
        let mut x: Vec<f64> = positions.iter().copied().collect();
        match self.law {
            Law::SiPi => x.extend(std::iter::repeat_n(0.0, d * self.tf.followers().len())),
            Law::Di | Law::DiAcc => {
                let mut v = match velocities {
                    Some(v) if v.len() != dn => {
                        return Err(Error::DimensionMismatch { expected: dn, got: v.len() })
                    }
                    Some(v) => v.iter().copied().collect(),
                    None => vec![0.0; dn],
                };
                let lead = self.motion.velocity(0.0, d);
                for &l in self.tf.leaders() {
                    v[l * d..(l + 1) * d].copy_from_slice(&lead);
                }
                x.extend(v);
            }
            Law::Unicycle => match headings {
                Some(h) if h.len() != n => {
                    return Err(Error::DimensionMismatch { expected: n, got: h.len() })
                }
                Some(h) => x.extend(h.iter().map(|&t| wrap_angle(t))),
                None => x.extend(std::iter::repeat_n(0.0, n)),
            },
            _ => {}
        }
        Ok(x)
    }

    /// Stacked positions of all agents.
    pub fn positions(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(&x[..self.dn()])
    }

    fn lap(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.weights.laplacian_apply(x, &mut out);
        out
    }

    /// `(L u)_f` for `u` equal to `lead` on leaders and zero elsewhere.
    fn leader_coupling(&self, lead: &[f64]) -> Vec<f64> {
        let d = self.tf.dim();
        let mut u = vec![0.0; self.dn()];
        for &l in self.tf.leaders() {
            u[l * d..(l + 1) * d].copy_from_slice(lead);
        }
        self.lap(&u)
    }

    /// Solves `L_ff y = rhs` for follower-stacked `rhs`.
    fn solve(&self, rhs: Vec<f64>) -> DVector<f64> {
        self.solver
            .as_ref()
            .expect("solver built for feedback laws")
            .solve(&DVector::from_vec(rhs))
    }

    fn bearing_field(&self, p: &[f64], dx: &mut [f64]) -> std::result::Result<(), Event> {
        let d = self.tf.dim();
        dx.fill(0.0);
        let mut g = vec![0.0; d];
        let mut term = vec![0.0; d];
        for (&(i, j), gs) in self.tf.graph().edges().iter().zip(self.tf.desired()) {
            for c in 0..d {
                g[c] = p[j * d + c] - p[i * d + c];
            }
            let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(len > EPS_DIST) {
                return Err(Event::Collocation { i, j });
            }
            g.iter_mut().for_each(|v| *v /= len);
            let dot: f64 = (0..d).map(|c| g[c] * gs[c]).sum();
            for c in 0..d {
                let projected = gs[c] - g[c] * dot;
                term[c] = match self.law {
                    Law::BearingOnly => -projected,
                    Law::BearingGradient => -projected / len,
                    _ => g[c] - gs[c],
                };
            }
            // Reversing an edge flips both g and g*, so each term is odd.
            for c in 0..d {
                dx[i * d + c] += term[c];
                dx[j * d + c] -= term[c];
            }
        }
        Ok(())
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

impl System for FormationSystem {
    fn dim(&self) -> usize {
        let (d, n) = (self.tf.dim(), self.tf.n());
        match self.law {
            Law::SiPi => d * n + d * self.tf.followers().len(),
            Law::Di | Law::DiAcc => 2 * d * n,
            Law::Unicycle => 3 * n,
            _ => d * n,
        }
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) -> std::result::Result<(), Event> {
        let (d, n, dn) = (self.tf.dim(), self.tf.n(), self.dn());
        let (kp, ki, kv) = (self.gains.kp, self.gains.ki, self.gains.kv);
        let p = &x[..dn];
        let followers = self.tf.followers();
        let set_leaders = |dx: &mut [f64], offset: usize, value: &[f64]| {
            for &l in self.tf.leaders() {
                dx[offset + l * d..offset + (l + 1) * d].copy_from_slice(value);
            }
        };
        match self.law {
            Law::Si | Law::SiPi | Law::SiVel => {
                let lp = self.lap(p);
                let lead = self.motion.velocity(t, d);
                set_leaders(dx, 0, &lead);
                let solved = (self.law == Law::SiVel).then(|| {
                    let coupling = self.leader_coupling(&lead);
                    let rhs = followers
                        .iter()
                        .flat_map(|&f| (0..d).map(move |c| f * d + c))
                        .map(|r| -kp * lp[r] - coupling[r])
                        .collect();
                    self.solve(rhs)
                });
                for (k, &f) in followers.iter().enumerate() {
                    for c in 0..d {
                        let r = f * d + c;
                        dx[r] = match self.law {
                            Law::Si => -lp[r],
                            Law::SiPi => {
                                dx[dn + k * d + c] = lp[r];
                                -kp * lp[r] - ki * x[dn + k * d + c]
                            }
                            _ => solved.as_ref().unwrap()[k * d + c],
                        };
                    }
                }
            }
            Law::Di | Law::DiAcc => {
                let v = &x[dn..];
                dx[..dn].copy_from_slice(v);
                let lp = self.lap(p);
                let lv = self.lap(v);
                let acc = self.motion.acceleration(t, d);
                set_leaders(dx, dn, &acc);
                let feedback = |r: usize| -kp * lp[r] - kv * lv[r];
                if self.law == Law::Di {
                    for &f in followers {
                        for c in 0..d {
                            dx[dn + f * d + c] = feedback(f * d + c);
                        }
                    }
                } else {
                    let coupling = self.leader_coupling(&acc);
                    let rhs = followers
                        .iter()
                        .flat_map(|&f| (0..d).map(move |c| f * d + c))
                        .map(|r| feedback(r) - coupling[r])
                        .collect();
                    let a = self.solve(rhs);
                    for (k, &f) in followers.iter().enumerate() {
                        for c in 0..d {
                            dx[dn + f * d + c] = a[k * d + c];
                        }
                    }
                }
            }
            Law::Unicycle => {
                let lp = self.lap(p);
                for i in 0..n {
                    let (sx, sy) = (-lp[2 * i], -lp[2 * i + 1]);
                    let (sn, cs) = x[dn + i].sin_cos();
                    let v = cs * sx + sn * sy;
                    let w = -sn * sx + cs * sy;
                    dx[2 * i] = v * cs;
                    dx[2 * i + 1] = v * sn;
                    dx[dn + i] = w;
                }
            }
            Law::BearingOnly | Law::BearingGradient | Law::BearingDescent => {
                self.bearing_field(p, dx)?;
            }
        }
        Ok(())
    }

    fn post_step(&self, _t: f64, x: &mut [f64]) {
        if self.law == Law::Unicycle {
            let dn = self.dn();
            x[dn..].iter_mut().for_each(|th| *th = wrap_angle(*th));
        }
    }

    fn autonomous(&self) -> bool {
        !self.law.uses_leaders() || self.motion.is_stationary()
    }

    fn state_names(&self) -> Vec<String> {
        let (d, n) = (self.tf.dim(), self.tf.n());
        let per_agent = |prefix: &'static str, nodes: Vec<usize>| -> Vec<String> {
            nodes
                .into_iter()
                .flat_map(|i| axis_labels(d).map(move |a| format!("{prefix}{}_{a}", i + 1)))
                .collect()
        };
        let mut names = per_agent("p", (0..n).collect());
        match self.law {
            Law::SiPi => names.extend(per_agent("xi", self.tf.followers().to_vec())),
            Law::Di | Law::DiAcc => names.extend(per_agent("v", (0..n).collect())),
            Law::Unicycle => names.extend((0..n).map(|i| format!("theta{}", i + 1))),
            _ => {}
        }
        names
    }

    fn metric_names(&self) -> Vec<String> {
        let mut names = vec!["bearing_error".to_string()];
        names.extend(axis_labels(self.tf.dim()).map(|a| format!("centroid_{a}")));
        names.extend(["scale", "phi1", "phi2"].map(String::from));
        match self.law {
            Law::SiVel => names.push("eps_norm".into()),
            Law::Unicycle => names.push("bearing_error_up_to_sign".into()),
            _ => {}
        }
        names
    }

    fn metrics(&self, _t: f64, x: &[f64]) -> Vec<f64> {
        let d = self.tf.dim();
        let p = self.positions(x);
        let mut out = vec![bearing_error(&self.tf, &p).unwrap_or(f64::NAN)];
        out.extend(centroid(&p, d));
        out.push(scale(&p, d));
        out.push(phi1(&self.tf, &p).unwrap_or(f64::NAN));
        out.push(phi2(&self.tf, &p).unwrap_or(f64::NAN));
        match self.law {
            Law::SiVel => {
                let lp = self.lap(p.as_slice());
                let eps: f64 = self
                    .tf
                    .followers()
                    .iter()
                    .flat_map(|&f| (0..d).map(move |c| f * d + c))
                    .map(|r| (self.gains.kp * lp[r]).powi(2))
                    .sum();
                out.push(eps.sqrt());
            }
            Law::Unicycle => out.push(sign_free_error(&self.tf, &p)),
            _ => {}
        }
        out
    }
}

/// `sum min(|g - g*|, |g + g*|)` over both orientations of every edge.
fn sign_free_error(tf: &TargetFormation, p: &DVector<f64>) -> f64 {
    let d = tf.dim();
    let mut total = 0.0;
    for (&(i, j), gs) in tf.graph().edges().iter().zip(tf.desired()) {
        let e = p.rows(j * d, d) - p.rows(i * d, d);
        let len = e.norm();
        if !(len > EPS_DIST) {
            return f64::NAN;
        }
        let g = e / len;
        total += 2.0 * (&g - gs).norm().min((&g + gs).norm());
    }
    total
}
