//! Orthogonal projection `P_x = I - x x^T / |x|^2`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::EPS_DIST;

/// Projection onto the orthogonal complement of `x`.
pub fn projection(x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let norm = x.norm();
    if norm <= EPS_DIST {
        return Err(Error::ZeroVector { norm });
    }
    let u = x / norm;
    Ok(DMatrix::identity(x.len(), x.len()) - &u * u.transpose())
}

/// Skew-symmetric matrix with `[x]_x y = x × y`.
pub fn cross_matrix(x: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -x.z, x.y, x.z, 0.0, -x.x, -x.y, x.x, 0.0)
}
