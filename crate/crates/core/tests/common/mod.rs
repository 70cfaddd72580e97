//! Reference implementations and dense oracles shared by the integration
//! tests. Everything here is written against plain vectors and nalgebra so
//! it does not reuse the solver kernels it checks.

#![allow(dead_code)]

use bregman_kaczmarz::linalg::DenseMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn to_dmatrix(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j))
}

fn shrink(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// Cumulative-probability table and inverse-transform lookup.
struct Table {
    cum: Vec<f64>,
}

impl Table {
    fn new(weights: &[f64]) -> Self {
        let mut total = 0.0;
        for w in weights {
            total += *w;
        }
        Self::with_total(weights, total)
    }

    fn with_total(weights: &[f64], total: f64) -> Self {
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in weights {
            acc += *w / total;
            cum.push(acc);
        }
        Self { cum }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        let mut k = 0;
        while k < self.cum.len() - 1 && self.cum[k] <= u {
            k += 1;
        }
        k
    }
}

/// Single-index extended Bregman-Kaczmarz written out with explicit loops:
/// draw column `j`, update the auxiliary dual, shrink; draw row `i`, update
/// the primal dual, shrink. `lambda_f = None` means `f = ½‖·‖²`.
pub struct ReferenceRebk {
    rows: Vec<Vec<f64>>,
    cols: Vec<Vec<f64>>,
    row_norm2: Vec<f64>,
    col_norm2: Vec<f64>,
    row_table: Table,
    col_table: Table,
    b: Vec<f64>,
    lambda_f: Option<f64>,
    rng: ChaCha8Rng,
    pub x_star: Vec<f64>,
    pub x: Vec<f64>,
    pub z_star: Vec<f64>,
}

impl ReferenceRebk {
    pub fn new(a: &DenseMatrix, b: &[f64], lambda_f: Option<f64>, seed: u64) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let rows: Vec<Vec<f64>> = (0..m).map(|i| (0..n).map(|j| a.get(i, j)).collect()).collect();
        let cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
        let sq = |v: &Vec<f64>| {
            let mut s = 0.0;
            for x in v {
                s += x * x;
            }
            s
        };
        let row_norm2: Vec<f64> = rows.iter().map(sq).collect();
        let col_norm2: Vec<f64> = cols.iter().map(sq).collect();
        let mut total = 0.0;
        for c in &col_norm2 {
            total += *c;
        }
        Self {
            row_table: Table::with_total(&row_norm2, total),
            col_table: Table::new(&col_norm2),
            rows,
            cols,
            row_norm2,
            col_norm2,
            b: b.to_vec(),
            lambda_f,
            rng: ChaCha8Rng::seed_from_u64(seed),
            x_star: vec![0.0; n],
            x: vec![0.0; n],
            z_star: b.to_vec(),
        }
    }

    pub fn step(&mut self) {
        let j = self.col_table.draw(&mut self.rng);
        let col = &self.cols[j];
        let mut d = 0.0;
        for (c, z) in col.iter().zip(&self.z_star) {
            d += c * z;
        }
        let t = d / self.col_norm2[j];
        for (z, c) in self.z_star.iter_mut().zip(col) {
            *z -= t * c;
        }

        let i = self.row_table.draw(&mut self.rng);
        let row = &self.rows[i];
        let mut r = 0.0;
        for (a, x) in row.iter().zip(&self.x) {
            r += a * x;
        }
        let t = (r - self.b[i] + self.z_star[i]) / self.row_norm2[i];
        for (xs, a) in self.x_star.iter_mut().zip(row) {
            *xs -= t * a;
        }
        for (x, xs) in self.x.iter_mut().zip(&self.x_star) {
            *x = match self.lambda_f {
                Some(l) => shrink(*xs, l),
                None => *xs,
            };
        }
    }
}

/// Classical randomized extended Kaczmarz on `(x, z)` with `x_0 = 0`,
/// `z_0 = b`.
pub struct ReferenceRek {
    inner: ReferenceRebk,
}

impl ReferenceRek {
    pub fn new(a: &DenseMatrix, b: &[f64], seed: u64) -> Self {
        Self { inner: ReferenceRebk::new(a, b, None, seed) }
    }

    pub fn step(&mut self) {
        self.inner.step();
    }

    pub fn x(&self) -> &[f64] {
        &self.inner.x
    }

    pub fn z(&self) -> &[f64] {
        &self.inner.z_star
    }
}

/// Orthogonal projectors onto `R(A)` and `R(Aᵀ)` from a thin SVD.
pub struct RangeProjectors {
    u: DMatrix<f64>,
    v: DMatrix<f64>,
}

impl RangeProjectors {
    pub fn new(a: &DenseMatrix) -> Self {
        let svd = to_dmatrix(a).svd(true, true);
        let s = &svd.singular_values;
        let top = s.iter().cloned().fold(0.0, f64::max);
        let cutoff = 1e-10 * top * a.rows().max(a.cols()) as f64;
        let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] > cutoff).collect();
        let u_full = svd.u.unwrap();
        let vt_full = svd.v_t.unwrap();
        let u = DMatrix::from_fn(a.rows(), keep.len(), |i, k| u_full[(i, keep[k])]);
        let v = DMatrix::from_fn(a.cols(), keep.len(), |j, k| vt_full[(keep[k], j)]);
        Self { u, v }
    }

    /// Component of `w` in `N(Aᵀ)`.
    pub fn left_null_part(&self, w: &[f64]) -> Vec<f64> {
        let w = DVector::from_column_slice(w);
        let r = &w - &self.u * (self.u.transpose() * &w);
        r.iter().copied().collect()
    }

    /// Component of `x` in `N(A)`.
    pub fn null_part(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        let r = &x - &self.v * (self.v.transpose() * &x);
        r.iter().copied().collect()
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Singular values via nalgebra, descending.
pub fn svd_values(a: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_dmatrix(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}
