//! Dense linear-algebra helpers shared by the rigidity and localization code.

use nalgebra::{DMatrix, DVector};

/// Singular values in descending order together with a full set of right
/// singular vectors.
///
/// The right singular vectors form a square `ncols x ncols` orthogonal
/// matrix even when the input has fewer rows than columns, so the trailing
/// columns always span the numerical null space.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub singular_values: Vec<f64>,
    pub right: DMatrix<f64>,
}

impl Spectrum {
    pub fn of(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        if cols == 0 {
            return Self { singular_values: Vec::new(), right: DMatrix::zeros(0, 0) };
        }
        // Pad wide matrices with zero rows so the SVD returns all `cols` right
        // singular vectors.
        let padded = if rows < cols {
            let mut p = DMatrix::zeros(cols, cols);
            p.view_mut((0, 0), (rows, cols)).copy_from(m);
            p
        } else {
            m.clone()
        };
        let svd = padded.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

        let mut singular_values = Vec::with_capacity(cols);
        let mut right = DMatrix::zeros(cols, cols);
        for (dst, &src) in order.iter().enumerate() {
            singular_values.push(svd.singular_values[src]);
            right.set_column(dst, &v_t.row(src).transpose());
        }
        // Only the first min(rows, cols) values are genuine.
        singular_values.truncate(rows.min(cols));
        Self { singular_values, right }
    }

    pub fn max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.singular_values, tol)
    }

    /// Columns of the right singular basis beyond the numerical rank.
    pub fn null_space(&self, tol: f64) -> DMatrix<f64> {
        let r = self.rank(tol);
        let n = self.right.ncols();
        self.right.columns(r, n - r).into_owned()
    }
}

/// Count of singular values strictly greater than `tol * max`. A zero matrix
/// has rank zero.
pub fn numerical_rank(singular_values: &[f64], tol: f64) -> usize {
    let max = singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > tol * max).count()
}

/// Orthonormal basis of the span of `vectors` via modified Gram-Schmidt with
/// one reorthogonalization pass. Vectors whose residual norm falls below
/// `tol` times their original norm are dropped as dependent.
pub fn orthonormal_basis(vectors: &[DVector<f64>], tol: f64) -> DMatrix<f64> {
    let len = vectors.first().map_or(0, |v| v.len());
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > tol * norm0 {
            basis.push(w / norm);
        }
    }
    let mut m = DMatrix::zeros(len, basis.len());
    for (k, q) in basis.iter().enumerate() {
        m.set_column(k, q);
    }
    m
}

/// Spectral condition number of a symmetric positive semi-definite matrix.
pub fn spd_condition(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let eig = m.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Submatrix with the given row and column index lists.
pub fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

/// Scalar indices of the `d`-blocks belonging to `nodes`.
pub fn block_indices(nodes: &[usize], d: usize) -> Vec<usize> {
    nodes.iter().flat_map(|&i| (i * d)..(i * d + d)).collect()
}
