use std::fmt;

use crate::error::{invalid, Result};

/// Dense real matrix kept in both row-major and column-major layout.
///
/// Row slices `A[i, :]` and column slices `A[:, j]` are contiguous, and so is
/// any contiguous range of rows or columns.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    row_major: Vec<f64>,
    col_major: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        let mut col_major = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                col_major[j * rows + i] = data[i * cols + j];
            }
        }
        Ok(Self { rows, cols, row_major: data, col_major })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("ragged rows"));
        }
        Self::from_row_major(m, n, rows.concat())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_row_major(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row_major[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.row_major[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.col_major[j * self.rows..(j + 1) * self.rows]
    }

    /// Rows `start..end`, row-major.
    pub fn row_range(&self, start: usize, end: usize) -> &[f64] {
        &self.row_major[start * self.cols..end * self.cols]
    }

    /// Columns `start..end`, column-major.
    pub fn col_range(&self, start: usize, end: usize) -> &[f64] {
        &self.col_major[start * self.rows..end * self.rows]
    }

    pub fn row_major(&self) -> &[f64] {
        &self.row_major
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A^T z`.
    pub fn mul_t_vec(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.rows, "mul_t_vec dimension mismatch");
        (0..self.cols).map(|j| dot(self.col(j), z)).collect()
    }

    pub fn frobenius2(&self) -> f64 {
        self.row_major.iter().map(|v| v * v).sum()
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            row_major: self.col_major.clone(),
            col_major: self.row_major.clone(),
        }
    }

    /// Copy of the columns listed in `cols`, in that order.
    pub fn select_cols(&self, cols: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &j in cols {
                data.push(self.get(i, j));
            }
        }
        Self::from_row_major(self.rows, cols.len(), data)
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_column_slice(self.rows, self.cols, &self.col_major)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        Self::from_row_major(rows, cols, data)
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(8)])?;
        }
        Ok(())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
