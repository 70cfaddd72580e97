use std::ops::Range;

use crate::error::{invalid, Result};

/// Contiguous partition of `0..ground_size` into blocks of `block_size`
/// indices; the last block holds the remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    ground_size: usize,
    block_size: usize,
    blocks: Vec<Range<usize>>,
}

impl Partition {
    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block(&self, i: usize) -> Range<usize> {
        self.blocks[i].clone()
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }
}

pub fn build_partition(ground_size: usize, tau: usize) -> Result<Partition> {
    if tau == 0 || tau > ground_size {
        return Err(invalid(format!(
            "block size {tau} must lie in 1..={ground_size}"
        )));
    }
    let blocks = (0..ground_size)
        .step_by(tau)
        .map(|start| start..(start + tau).min(ground_size))
        .collect();
    Ok(Partition { ground_size, block_size: tau, blocks })
}
