//! Largest squared singular value of a contiguous block.
//!
//! The block is handed over as `count` contiguous vectors of length `len`
//! (rows of a row block, or columns of a column block). Power iteration runs
//! on the Gram matrix of whichever side is smaller, from the all-ones vector
//! and from a fixed quasi-random vector; blocks whose smaller side is at most
//! 3 are handled exactly with a Jacobi eigen-solve.

use crate::error::{Error, Result};

use super::matrix::dot;

/// Relative change of the Rayleigh quotient at which power iteration stops.
pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITERS: usize = 5000;

const EXACT_DIM: usize = 3;

pub fn block_sigma_max2(vectors: &[f64], count: usize, len: usize, label: &str) -> Result<f64> {
    debug_assert_eq!(vectors.len(), count * len);
    let (gram, dim) = gram(vectors, count, len);
    if dim == 1 {
        return Ok(gram[0]);
    }
    if dim <= EXACT_DIM {
        return Ok(jacobi_eigenvalues(gram, dim).into_iter().fold(0.0, f64::max));
    }
    let ones = vec![1.0; dim];
    let lambda = power_iteration(&gram, dim, ones, label)?;
    // Structured blocks (e.g. ±1 entries) can keep the all-ones iterate
    // exactly inside a non-dominant invariant subspace; a second start with
    // no such structure catches this.
    let golden = (1..=dim).map(|k| (k as f64 * 0.618_033_988_749_894_9).fract() - 0.5).collect();
    let other = power_iteration(&gram, dim, golden, label)?;
    Ok(lambda.max(other))
}

/// Gram matrix of the smaller side, row-major `dim x dim`.
fn gram(vectors: &[f64], count: usize, len: usize) -> (Vec<f64>, usize) {
    if count <= len {
        let mut g = vec![0.0; count * count];
        for a in 0..count {
            let va = &vectors[a * len..(a + 1) * len];
            for b in a..count {
                let v = dot(va, &vectors[b * len..(b + 1) * len]);
                g[a * count + b] = v;
                g[b * count + a] = v;
            }
        }
        (g, count)
    } else {
        let mut g = vec![0.0; len * len];
        for v in vectors.chunks_exact(len) {
            for a in 0..len {
                for b in a..len {
                    g[a * len + b] += v[a] * v[b];
                }
            }
        }
        for a in 0..len {
            for b in 0..a {
                g[a * len + b] = g[b * len + a];
            }
        }
        (g, len)
    }
}

fn power_iteration(gram: &[f64], dim: usize, mut v: Vec<f64>, label: &str) -> Result<f64> {
    let mut w = vec![0.0; dim];
    let mut prev = f64::NAN;
    for _ in 0..POWER_MAX_ITERS {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = dot(&gram[i * dim..(i + 1) * dim], &v);
        }
        let vv = dot(&v, &v);
        let rq = dot(&v, &w) / vv;
        let wn = dot(&w, &w).sqrt();
        if wn == 0.0 {
            return Ok(0.0);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        if (rq - prev).abs() <= POWER_TOL * rq.abs() {
            return Ok(rq);
        }
        prev = rq;
    }
    Err(Error::NumericalFailure(format!(
        "power iteration did not converge in {POWER_MAX_ITERS} iterations for {label}"
    )))
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        let diag: f64 = (0..n).map(|p| a[p * n + p] * a[p * n + p]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
