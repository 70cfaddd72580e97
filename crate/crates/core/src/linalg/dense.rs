//! Dense decompositions backed by nalgebra: singular values, numerical rank,
//! orthonormal bases.

use nalgebra::DMatrix;

use super::matrix::DenseMatrix;

/// Singular values in descending order.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Rank with threshold `rel_tol * sigma_1 * max(m, n)`.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let cutoff = rel_tol * s[0] * a.rows().max(a.cols()) as f64;
    s.iter().filter(|&&v| v > cutoff).count()
}

/// Orthonormal basis of the column space of `a` (thin QR, no pivoting).
/// Assumes `a` has full column rank.
pub fn orthonormal_columns(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().qr().q()
}

/// Orthonormal basis of `N(A^T)` as an `m x (m - r)` matrix, where `r` is the
/// numerical rank at threshold `rel_tol * sigma_1 * max(m, n)`.
pub fn null_space_of_transpose(a: &DenseMatrix, rel_tol: f64) -> DMatrix<f64> {
    let m = a.rows();
    let svd = a.to_nalgebra().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma1 = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * sigma1 * a.rows().max(a.cols()) as f64;
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff)
        .map(|(k, _)| k)
        .collect();
    let r = keep.len();
    if r == m {
        return DMatrix::zeros(m, 0);
    }
    // QR of [U_r | I]: the trailing m - r columns of the full Q span the
    // orthogonal complement of range(U_r).
    let mut aug = DMatrix::zeros(m, r + m);
    for (c, &k) in keep.iter().enumerate() {
        aug.set_column(c, &u.column(k));
    }
    for i in 0..m {
        aug[(i, r + i)] = 1.0;
    }
    let q = aug.qr().q();
    q.columns(r, m - r).into_owned()
}
