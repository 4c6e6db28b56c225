use nalgebra::{DMatrix, DVector};

use super::bearing::translations;
use super::network::Network;
use super::report::RigidityReport;
use crate::linalg::orthonormal_basis;

/// Translations plus the infinitesimal rotations `(E_ab p_i)_i`, one per
/// skew generator `E_ab = e_b e_a^T - e_a e_b^T`, `a < b`.
///
/// Rotations that the configuration does not resolve (for example a
/// collinear configuration rotated about its own line in 3D) collapse during
/// orthonormalization, so the basis has the dimension actually spanned.
pub fn trivial_distance_motion_basis(net: &Network) -> DMatrix<f64> {
    let (n, d) = (net.n(), net.dim());
    let mut generators = translations(n, d);
    for a in 0..d {
        for b in (a + 1)..d {
            let mut v = DVector::zeros(n * d);
            for i in 0..n {
                let p = net.position(i);
                v[i * d + b] = p[a];
                v[i * d + a] = -p[b];
            }
            generators.push(v);
        }
    }
    orthonormal_basis(&generators, 1e-10)
}

/// Rigid iff `Null(R_D)` is exactly the trivial motion space.
pub fn is_infinitesimally_distance_rigid(net: &Network) -> RigidityReport {
    let trivial = trivial_distance_motion_basis(net);
    let expected = net.dim() * net.n() - trivial.ncols();
    RigidityReport::from_matrix(&net.distance_rigidity_matrix(), expected, &trivial)
}
