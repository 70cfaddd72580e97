use nalgebra::{DMatrix, DVector};
use rand::seq::index;

use crate::error::{invalid, Error, Result};
use crate::linalg::{null_space_of_transpose, orthonormal_columns, DenseMatrix};
use crate::rng::RandomStream;

/// Relative rank threshold for the null-space basis of `Aᵀ`.
pub const NULL_SPACE_RANK_TOL: f64 = 1e-10;

/// `⌈0.01 n⌉`.
pub fn default_nnz(n: usize) -> usize {
    n.div_ceil(100).max(1)
}

pub fn gen_gaussian(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    gaussian_from(m, n, &mut RandomStream::new(seed))
}

pub fn gen_bernoulli(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    bernoulli_from(m, n, &mut RandomStream::new(seed))
}

pub fn gen_structured(m: usize, n: usize, rank: usize, kappa: f64, seed: u64) -> Result<DenseMatrix> {
    structured_from(m, n, rank, kappa, &mut RandomStream::new(seed))
}

pub fn gen_sparse_solution(n: usize, nnz: usize, seed: u64) -> Result<Vec<f64>> {
    sparse_from(n, nnz, &mut RandomStream::new(seed))
}

pub fn null_space_noise(a: &DenseMatrix, q: f64, y_hat: &[f64], seed: u64) -> Result<Vec<f64>> {
    noise_from(a, q, y_hat, &mut RandomStream::new(seed))
}

pub(crate) fn gaussian_from(m: usize, n: usize, rng: &mut RandomStream) -> Result<DenseMatrix> {
    let data = (0..m * n).map(|_| rng.normal()).collect();
    DenseMatrix::from_row_major(m, n, data)
}

pub(crate) fn bernoulli_from(m: usize, n: usize, rng: &mut RandomStream) -> Result<DenseMatrix> {
    let data = (0..m * n).map(|_| if rng.coin() { 1.0 } else { -1.0 }).collect();
    DenseMatrix::from_row_major(m, n, data)
}

/// `U D Vᵀ` with `U`, `V` orthonormalized Gaussian matrices and
/// `D = diag(1 + (κ - 1) u)`, `u ~ U[0, 1)`.
pub(crate) fn structured_from(
    m: usize,
    n: usize,
    rank: usize,
    kappa: f64,
    rng: &mut RandomStream,
) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(invalid("matrix dimensions must be positive"));
    }
    if rank == 0 || rank > m.min(n) {
        return Err(invalid(format!("rank {rank} must lie in 1..={}", m.min(n))));
    }
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(invalid(format!("condition bound kappa must exceed 1, got {kappa}")));
    }
    let mut gauss = |rows: usize| DMatrix::from_row_iterator(rows, rank, (0..rows * rank).map(|_| rng.normal()));
    let gu = gauss(m);
    let gv = gauss(n);
    let u = orthonormal_columns(&gu);
    let v = orthonormal_columns(&gv);
    let d = DVector::from_iterator(rank, (0..rank).map(|_| 1.0 + (kappa - 1.0) * rng.uniform()));
    let ud = u * DMatrix::from_diagonal(&d);
    DenseMatrix::from_nalgebra(&(ud * v.transpose()))
}

pub(crate) fn sparse_from(n: usize, nnz: usize, rng: &mut RandomStream) -> Result<Vec<f64>> {
    if nnz == 0 || nnz > n {
        return Err(invalid(format!("nnz {nnz} must lie in 1..={n}")));
    }
    let support = index::sample(rng.rng_mut(), n, nnz);
    let mut x = vec![0.0; n];
    for i in support.iter() {
        let mut v = rng.normal();
        // a draw of exactly zero would silently shrink the support
        while v == 0.0 {
            v = rng.normal();
        }
        x[i] = v;
    }
    Ok(x)
}

/// `e = H v` with `H` an orthonormal basis of `N(Aᵀ)` and `v` uniform on the
/// sphere of radius `q ‖ŷ‖`.
pub(crate) fn noise_from(a: &DenseMatrix, q: f64, y_hat: &[f64], rng: &mut RandomStream) -> Result<Vec<f64>> {
    let m = a.rows();
    if y_hat.len() != m {
        return Err(invalid("noise: y_hat length differs from row count"));
    }
    if !(q >= 0.0) || !q.is_finite() {
        return Err(invalid(format!("noise level must be finite and >= 0, got {q}")));
    }
    if q == 0.0 {
        return Ok(vec![0.0; m]);
    }
    let h = null_space_of_transpose(a, NULL_SPACE_RANK_TOL);
    let k = h.ncols();
    if k == 0 {
        return Err(Error::InfeasibleNoise(format!(
            "noise level {q} requested but N(A^T) is trivial for a {}x{} matrix",
            m,
            a.cols()
        )));
    }
    let rho = q * y_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut v = DVector::from_iterator(k, (0..k).map(|_| rng.normal()));
    let nv = v.norm();
    v *= rho / nv;
    let e = h * v;
    Ok(e.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, numerical_rank, singular_values};

    #[test]
    fn gaussian_is_deterministic() {
        assert_eq!(gen_gaussian(2, 2, 17).unwrap(), gen_gaussian(2, 2, 17).unwrap());
        assert_ne!(gen_gaussian(2, 2, 17).unwrap(), gen_gaussian(2, 2, 18).unwrap());
    }

    #[test]
    fn gaussian_moments() {
        let a = gen_gaussian(1000, 500, 1).unwrap();
        let n = 500_000.0;
        let mean = a.row_major().iter().sum::<f64>() / n;
        let var = a.row_major().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((0.97..1.03).contains(&var), "{var}");
        let b = gen_gaussian(500, 1000, 2).unwrap();
        let ratio = b.frobenius2() / 500_000.0;
        assert!((0.97..1.03).contains(&ratio));
    }

    #[test]
    fn bernoulli_entries() {
        let a = gen_bernoulli(500, 1000, 3).unwrap();
        assert!(a.row_major().iter().all(|&v| v == 1.0 || v == -1.0));
        assert_eq!(a.frobenius2(), 500_000.0);
        let plus = a.row_major().iter().filter(|&&v| v == 1.0).count() as f64 / 500_000.0;
        assert!((0.49..0.51).contains(&plus));
    }

    #[test]
    fn structured_rank_and_conditioning() {
        let a = gen_structured(20, 10, 8, 5.0, 4).unwrap();
        let s = singular_values(&a);
        assert!(s[8] < 1e-10 * s[0]);
        assert_eq!(numerical_rank(&a, 1e-10), 8);
        for &v in &s[..8] {
            assert!(v > 1.0 - 1e-10 && v < 5.0 + 1e-10, "{v}");
        }
        assert!(gen_structured(4, 3, 4, 2.0, 0).is_err());
        assert!(gen_structured(4, 3, 2, 1.0, 0).is_err());
    }

    #[test]
    fn sparse_support_sizes() {
        assert_eq!(default_nnz(1000), 10);
        assert_eq!(default_nnz(50), 1);
        assert_eq!(default_nnz(784), 8);
        let x = gen_sparse_solution(1000, default_nnz(1000), 9).unwrap();
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 10);
        let x = gen_sparse_solution(50, default_nnz(50), 9).unwrap();
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn support_is_uniform() {
        let (n, nnz, trials) = (20usize, 3usize, 10_000u64);
        let mut hits = vec![0u32; n];
        for t in 0..trials {
            for (i, v) in gen_sparse_solution(n, nnz, t).unwrap().iter().enumerate() {
                if *v != 0.0 {
                    hits[i] += 1;
                }
            }
        }
        let p = nnz as f64 / n as f64;
        let mean = p * trials as f64;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        for h in hits {
            assert!((h as f64 - mean).abs() < 3.0 * sd + 1.0, "{h} vs {mean}±{sd}");
        }
    }

    #[test]
    fn noise_lies_in_left_null_space() {
        let a = gen_gaussian(30, 12, 6).unwrap();
        let x = gen_sparse_solution(12, 2, 6).unwrap();
        let y = a.mul_vec(&x);
        assert_eq!(null_space_noise(&a, 0.0, &y, 1).unwrap(), vec![0.0; 30]);
        let e = null_space_noise(&a, 5.0, &y, 1).unwrap();
        let ne = norm2(&e);
        assert!((ne - 5.0 * norm2(&y)).abs() <= 1e-12 * ne);
        assert!(norm2(&a.mul_t_vec(&e)) / (a.frobenius2().sqrt() * ne) <= 1e-8);
    }

    #[test]
    fn noise_needs_nontrivial_null_space() {
        let a = gen_gaussian(5, 8, 0).unwrap();
        let y = a.mul_vec(&[1.0; 8]);
        assert!(matches!(null_space_noise(&a, 1.0, &y, 0), Err(Error::InfeasibleNoise(_))));
    }
}
