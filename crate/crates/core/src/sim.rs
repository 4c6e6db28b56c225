//! Fixed-step integration of multi-agent dynamics and trajectory recording.
//!
//! Column labels produced by the systems in this crate use 1-based node
//! ids, matching the network file format.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::EPS_DIST;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub method: Method,
    pub record_every: usize,
    pub seed: u64,
    /// A run of an autonomous system stops once the field norm drops below
    /// this value.
    pub eps_conv: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 30.0,
            method: Method::Rk4,
            record_every: 1,
            seed: 0,
            eps_conv: 1e-9,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive and finite");
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("T must be positive and finite");
        }
        if self.dt > self.horizon {
            return bad("dt must not exceed T");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        if !(self.eps_conv >= 0.0) {
            return bad("eps_conv must be non-negative");
        }
        Ok(())
    }

    /// Number of steps; the last one is shortened when `dt` does not divide
    /// `T`.
    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Why a run stopped before the horizon, or a notable condition it hit.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Converged { field_norm: f64 },
    Collocation { i: usize, j: usize },
    SingularGain { follower: usize },
    NonFinite,
}

impl Event {
    /// Convergence is the only event that is not an error.
    pub fn is_error(&self) -> bool {
        !matches!(self, Event::Converged { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub t: f64,
    #[serde(flatten)]
    pub event: Event,
}

/// A state-space model `x' = f(t, x)`.
pub trait System {
    fn dim(&self) -> usize;

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) -> std::result::Result<(), Event>;

    /// Projection back onto the state manifold after a completed step.
    fn post_step(&self, _t: f64, _x: &mut [f64]) {}

    /// Whether `f` does not depend on `t`. Only autonomous systems stop on
    /// convergence.
    fn autonomous(&self) -> bool {
        true
    }

    fn state_names(&self) -> Vec<String> {
        (0..self.dim()).map(|k| format!("x{k}")).collect()
    }

    fn metric_names(&self) -> Vec<String> {
        Vec::new()
    }

    fn metrics(&self, _t: f64, _x: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub state_names: Vec<String>,
    pub states: Vec<Vec<f64>>,
    pub metric_names: Vec<String>,
    pub metrics: Vec<Vec<f64>>,
    pub events: Vec<EventRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("a trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a trajectory holds the initial state")
    }

    pub fn final_metrics(&self) -> &[f64] {
        self.metrics.last().expect("a trajectory holds the initial state")
    }

    /// One metric over all snapshots.
    pub fn metric(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.metric_names.iter().position(|m| m == name)?;
        Some(self.metrics.iter().map(|row| row[k]).collect())
    }

    pub fn final_metric(&self, name: &str) -> Option<f64> {
        let k = self.metric_names.iter().position(|m| m == name)?;
        Some(self.final_metrics()[k])
    }

    /// Events other than convergence.
    pub fn error_events(&self) -> impl Iterator<Item = &EventRecord> {
        self.events.iter().filter(|e| e.event.is_error())
    }

    pub fn converged(&self) -> bool {
        self.events.iter().any(|e| matches!(e.event, Event::Converged { .. }))
    }

    fn record<S: System + ?Sized>(&mut self, sys: &S, t: f64, x: &[f64]) {
        self.times.push(t);
        self.states.push(x.to_vec());
        self.metrics.push(sys.metrics(t, x));
    }
}

struct Stepper {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n] }
    }

    /// Advances `x` by `h`; `self.k[0]` must already hold `f(t, x)`.
    fn step<S: System + ?Sized>(
        &mut self,
        sys: &S,
        method: Method,
        t: f64,
        h: f64,
        x: &mut [f64],
    ) -> std::result::Result<(), Event> {
        match method {
            Method::Euler => {
                for (xi, ki) in x.iter_mut().zip(&self.k[0]) {
                    *xi += h * ki;
                }
            }
            Method::Rk4 => {
                let [k1, k2, k3, k4] = &mut self.k;
                axpy(&mut self.tmp, x, 0.5 * h, k1);
                sys.derivative(t + 0.5 * h, &self.tmp, k2)?;
                axpy(&mut self.tmp, x, 0.5 * h, k2);
                sys.derivative(t + 0.5 * h, &self.tmp, k3)?;
                axpy(&mut self.tmp, x, h, k3);
                sys.derivative(t + h, &self.tmp, k4)?;
                for i in 0..x.len() {
                    x[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
                }
            }
        }
        Ok(())
    }
}

fn axpy(out: &mut [f64], x: &[f64], a: f64, y: &[f64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

/// Integrates `sys` from `x0` over `[0, T]`.
///
/// Snapshots are taken at step 0, every `record_every` steps, and at the
/// final state. A run ends early on convergence (autonomous systems only),
/// on an error event raised by the field, or on a non-finite state; the last
/// recorded snapshot is always the last finite state reached.
pub fn integrate<S: System + ?Sized>(sys: &S, x0: &[f64], cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if x0.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: x0.len() });
    }
    let mut traj = Trajectory {
        times: Vec::new(),
        state_names: sys.state_names(),
        states: Vec::new(),
        metric_names: sys.metric_names(),
        metrics: Vec::new(),
        events: Vec::new(),
    };
    let mut x = x0.to_vec();
    let mut stepper = Stepper::new(x.len());
    let steps = cfg.steps();
    let mut t = 0.0;
    traj.record(sys, t, &x);
    for step in 0..steps {
        let halt = |traj: &mut Trajectory, t: f64, event: Event| {
            traj.events.push(EventRecord { t, event });
        };
        if let Err(event) = sys.derivative(t, &x, &mut stepper.k[0]) {
            halt(&mut traj, t, event);
            break;
        }
        if sys.autonomous() {
            let norm = stepper.k[0].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < cfg.eps_conv {
                halt(&mut traj, t, Event::Converged { field_norm: norm });
                break;
            }
        }
        let t_next = if step + 1 == steps { cfg.horizon } else { (step + 1) as f64 * cfg.dt };
        let mut next = x.clone();
        if let Err(event) = stepper.step(sys, cfg.method, t, t_next - t, &mut next) {
            halt(&mut traj, t, event);
            break;
        }
        sys.post_step(t_next, &mut next);
        if next.iter().any(|v| !v.is_finite()) {
            halt(&mut traj, t_next, Event::NonFinite);
            break;
        }
        x = next;
        t = t_next;
        if (step + 1) % cfg.record_every == 0 {
            traj.record(sys, t, &x);
        }
    }
    if *traj.times.last().unwrap() != t {
        traj.record(sys, t, &x);
    }
    Ok(traj)
}

/// A single step of the chosen method, exposed for order checks.
pub fn step_once<S: System + ?Sized>(
    sys: &S,
    method: Method,
    t: f64,
    h: f64,
    x: &mut [f64],
) -> std::result::Result<(), Event> {
    let mut stepper = Stepper::new(x.len());
    sys.derivative(t, x, &mut stepper.k[0])?;
    stepper.step(sys, method, t, h, x)
}

/// `n` points drawn i.i.d. uniformly from the box `[lo, hi)^d`, with no
/// two points closer than [`EPS_DIST`].
pub fn random_configuration(n: usize, d: usize, bounds: (f64, f64), seed: u64) -> Result<DVector<f64>> {
    let (lo, hi) = bounds;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidConfig(format!("empty or unbounded box [{lo}, {hi})")));
    }
    if n == 0 || d == 0 {
        return Err(Error::InvalidConfig("need at least one point and one axis".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_configuration_with(&mut rng, n, d, bounds, None))
}

/// Like [`random_configuration`] with a caller-owned generator. With a
/// graph only adjacent pairs are checked for collocation; without one every
/// pair is.
pub fn random_configuration_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
    (lo, hi): (f64, f64),
    graph: Option<&Graph>,
) -> DVector<f64> {
    loop {
        let p = DVector::from_fn(n * d, |_, _| lo + (hi - lo) * rng.gen::<f64>());
        let close = |i: usize, j: usize| {
            let dist2: f64 = (0..d).map(|c| (p[i * d + c] - p[j * d + c]).powi(2)).sum();
            dist2.sqrt() <= EPS_DIST
        };
        let collocated = match graph {
            Some(g) => g.edges().iter().any(|&(i, j)| close(i, j)),
            None => (0..n).any(|i| (i + 1..n).any(|j| close(i, j))),
        };
        if !collocated {
            return p;
        }
    }
}
