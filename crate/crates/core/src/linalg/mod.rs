//! Dense storage, contiguous block partitions, block spectra and block sampling.

mod dense;
mod matrix;
mod partition;
mod partitioned;
mod sampler;
mod spectrum;

pub use dense::{null_space_of_transpose, numerical_rank, orthonormal_columns, singular_values};
pub use matrix::{dot, norm2, DenseMatrix};
pub use partition::{build_partition, Partition};
pub use partitioned::{analyze, beta_max, PartitionedMatrix, Side};
pub use sampler::{make_sampler, BlockSampler};
pub use spectrum::{block_sigma_max2, POWER_MAX_ITERS, POWER_TOL};
