use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bearing::is_infinitesimally_bearing_rigid;
use super::network::Network;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::random_configuration_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericVerdict {
    Yes,
    /// Every sampled configuration failed; sampling cannot certify the
    /// negative.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericReport {
    pub verdict: GenericVerdict,
    pub dim: usize,
    pub trials_run: usize,
    pub seed: u64,
    /// Index of the first infinitesimally bearing rigid sample.
    pub certifying_trial: Option<usize>,
    pub expected_rank: usize,
    /// Highest rank of `R_B` seen over the samples.
    pub best_rank: usize,
}

/// Samples configurations uniformly in `[0, 1]^d` and stops at the first
/// infinitesimally bearing rigid one.
pub fn is_generically_bearing_rigid(
    g: &Graph,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<GenericReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if dim < 2 {
        return Err(Error::BadDimension(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GenericReport {
        verdict: GenericVerdict::Inconclusive,
        dim,
        trials_run: 0,
        seed,
        certifying_trial: None,
        expected_rank: dim * g.n() - dim - 1,
        best_rank: 0,
    };
    for trial in 0..trials {
        let p = random_configuration_with(&mut rng, g.n(), dim, (0.0, 1.0), Some(g));
        let net = Network::new(g.clone(), dim, p)?;
        let r = is_infinitesimally_bearing_rigid(&net);
        report.trials_run = trial + 1;
        report.best_rank = report.best_rank.max(r.rank);
        if r.is_rigid() {
            report.verdict = GenericVerdict::Yes;
            report.certifying_trial = Some(trial);
            break;
        }
    }
    Ok(report)
}
