use crate::error::{Error, Result};

use super::matrix::{dot, DenseMatrix};
use super::partition::{build_partition, Partition};
use super::sampler::{make_sampler, BlockSampler};
use super::spectrum::block_sigma_max2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Row,
    Col,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Row => "row",
            Side::Col => "column",
        }
    }
}

/// A matrix together with its row/column partitions and every per-block
/// quantity the block solvers need. Immutable once built.
#[derive(Debug, Clone)]
pub struct PartitionedMatrix {
    matrix: DenseMatrix,
    row_partition: Partition,
    col_partition: Partition,
    row_norms2: Vec<f64>,
    col_norms2: Vec<f64>,
    row_block_fro2: Vec<f64>,
    col_block_fro2: Vec<f64>,
    total_fro2: f64,
    row_block_sigma_max2: Vec<f64>,
    col_block_sigma_max2: Vec<f64>,
    row_sampler: BlockSampler,
    col_sampler: BlockSampler,
}

/// Precomputes partitions, norms, block spectra and samplers.
///
/// `tau` is clamped per dimension. Zero blocks are rejected.
pub fn analyze(matrix: DenseMatrix, tau: usize) -> Result<PartitionedMatrix> {
    if tau == 0 {
        return Err(Error::InvalidArgument("block size must be positive".into()));
    }
    let (m, n) = (matrix.rows(), matrix.cols());
    let row_partition = build_partition(m, tau.min(m))?;
    let col_partition = build_partition(n, tau.min(n))?;

    let row_norms2: Vec<f64> = (0..m).map(|i| dot(matrix.row(i), matrix.row(i))).collect();
    let col_norms2: Vec<f64> = (0..n).map(|j| dot(matrix.col(j), matrix.col(j))).collect();
    let block_sums = |p: &Partition, norms: &[f64]| -> Vec<f64> {
        p.blocks().iter().map(|b| norms[b.clone()].iter().sum()).collect()
    };
    let row_block_fro2 = block_sums(&row_partition, &row_norms2);
    let col_block_fro2 = block_sums(&col_partition, &col_norms2);
    let total_fro2: f64 = col_norms2.iter().sum();

    let row_sampler = make_sampler(&row_block_fro2, total_fro2, "row")?;
    let col_sampler = make_sampler(&col_block_fro2, total_fro2, "column")?;

    let row_block_sigma_max2 = row_partition
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            block_sigma_max2(matrix.row_range(b.start, b.end), b.len(), n, &format!("row block {k}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let col_block_sigma_max2 = col_partition
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            block_sigma_max2(matrix.col_range(b.start, b.end), b.len(), m, &format!("column block {k}"))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PartitionedMatrix {
        matrix,
        row_partition,
        col_partition,
        row_norms2,
        col_norms2,
        row_block_fro2,
        col_block_fro2,
        total_fro2,
        row_block_sigma_max2,
        col_block_sigma_max2,
        row_sampler,
        col_sampler,
    })
}

/// Maximum over blocks of `sigma_max^2(B) / ||B||_F^2`; lies in `(0, 1]`.
pub fn beta_max(pm: &PartitionedMatrix, side: Side) -> f64 {
    let (sig, fro) = match side {
        Side::Row => (&pm.row_block_sigma_max2, &pm.row_block_fro2),
        Side::Col => (&pm.col_block_sigma_max2, &pm.col_block_fro2),
    };
    sig.iter().zip(fro).map(|(s, f)| s / f).fold(0.0, f64::max)
}

impl PartitionedMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn partition(&self, side: Side) -> &Partition {
        match side {
            Side::Row => &self.row_partition,
            Side::Col => &self.col_partition,
        }
    }

    pub fn row_norms2(&self) -> &[f64] {
        &self.row_norms2
    }

    pub fn col_norms2(&self) -> &[f64] {
        &self.col_norms2
    }

    pub fn block_fro2(&self, side: Side) -> &[f64] {
        match side {
            Side::Row => &self.row_block_fro2,
            Side::Col => &self.col_block_fro2,
        }
    }

    pub fn block_sigma_max2(&self, side: Side) -> &[f64] {
        match side {
            Side::Row => &self.row_block_sigma_max2,
            Side::Col => &self.col_block_sigma_max2,
        }
    }

    pub fn total_fro2(&self) -> f64 {
        self.total_fro2
    }

    pub fn sampler(&self, side: Side) -> &BlockSampler {
        match side {
            Side::Row => &self.row_sampler,
            Side::Col => &self.col_sampler,
        }
    }

    pub fn beta_max(&self, side: Side) -> f64 {
        beta_max(self, side)
    }
}
