use nalgebra::{DMatrix, DVector};

use super::network::Network;
use super::report::RigidityReport;
use crate::linalg::orthonormal_basis;

/// Orthonormal basis of `span{1_n ⊗ I_d, p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivialBasis {
    /// `d n x k` matrix with orthonormal columns; `k` is `d + 1`, or `d`
    /// when `p` is itself a translation.
    pub basis: DMatrix<f64>,
    pub degenerate: bool,
}

/// Translations and the scaling direction `p`.
pub fn trivial_bearing_motion_basis(net: &Network) -> TrivialBasis {
    let basis = trivial_basis_for(net.n(), net.dim(), net.positions());
    let degenerate = basis.ncols() < net.dim() + 1;
    TrivialBasis { basis, degenerate }
}

pub(crate) fn trivial_basis_for(n: usize, d: usize, p: &DVector<f64>) -> DMatrix<f64> {
    let mut generators = translations(n, d);
    generators.push(p.clone());
    orthonormal_basis(&generators, 1e-10)
}

pub(crate) fn translations(n: usize, d: usize) -> Vec<DVector<f64>> {
    (0..d)
        .map(|axis| DVector::from_fn(n * d, |r, _| if r % d == axis { 1.0 } else { 0.0 }))
        .collect()
}

/// Rigid iff `rank(R_B) = d n - d - 1`.
pub fn is_infinitesimally_bearing_rigid(net: &Network) -> RigidityReport {
    let d = net.dim();
    let expected = d * net.n() - d - 1;
    let trivial = trivial_bearing_motion_basis(net);
    RigidityReport::from_matrix(&net.bearing_rigidity_matrix(), expected, &trivial.basis)
}
