use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::linalg::Spectrum;
use crate::RANK_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Rigid,
    NotRigid,
}

/// Rank-based rigidity verdict for one rigidity matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub rank: usize,
    pub nullity: usize,
    pub expected_rank: usize,
    pub verdict: Verdict,
    /// Dimension of the trivial-motion subspace actually spanned by the
    /// configuration.
    pub trivial_dimension: usize,
    /// Unit-norm nontrivial infinitesimal motion, present when not rigid.
    pub witness: Option<Vec<f64>>,
    /// Descending singular values of the rigidity matrix.
    pub singular_values: Vec<f64>,
}

impl RigidityReport {
    pub fn is_rigid(&self) -> bool {
        self.verdict == Verdict::Rigid
    }

    /// Ranks `matrix`, compares against `expected_rank`, and extracts a
    /// witness orthogonal to the columns of `trivial` when not rigid.
    pub(crate) fn from_matrix(
        matrix: &DMatrix<f64>,
        expected_rank: usize,
        trivial: &DMatrix<f64>,
    ) -> Self {
        let spectrum = Spectrum::of(matrix);
        let rank = spectrum.rank(RANK_TOL);
        let nullity = matrix.ncols() - rank;
        let verdict = if rank == expected_rank { Verdict::Rigid } else { Verdict::NotRigid };
        let witness = match verdict {
            Verdict::Rigid => None,
            Verdict::NotRigid => nontrivial_motion(&spectrum.null_space(RANK_TOL), trivial)
                .map(|w| w.iter().copied().collect()),
        };
        Self {
            rank,
            nullity,
            expected_rank,
            verdict,
            trivial_dimension: trivial.ncols(),
            witness,
            singular_values: spectrum.singular_values,
        }
    }
}

/// Null-space direction with the largest component outside the trivial
/// subspace, projected off that subspace and renormalized.
///
/// Null vectors are scanned from the smallest singular value upward.
fn nontrivial_motion(null: &DMatrix<f64>, trivial: &DMatrix<f64>) -> Option<DVector<f64>> {
    let mut best: Option<DVector<f64>> = None;
    let mut best_norm = 1e-6;
    for c in (0..null.ncols()).rev() {
        let v = null.column(c).into_owned();
        let residual = &v - trivial * (trivial.transpose() * &v);
        let norm = residual.norm();
        if norm > best_norm {
            best_norm = norm;
            best = Some(residual);
        }
    }
    best.map(|w| w.normalize())
}
