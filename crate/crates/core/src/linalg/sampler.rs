use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Inverse-transform sampler over blocks weighted by squared Frobenius norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSampler {
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

/// Builds a sampler with `weights[i] = block_fro2[i] / total_fro2`.
///
/// `side` only labels the degenerate-block error.
pub fn make_sampler(block_fro2: &[f64], total_fro2: f64, side: &'static str) -> Result<BlockSampler> {
    if block_fro2.is_empty() {
        return Err(Error::InvalidArgument("sampler needs at least one block".into()));
    }
    if let Some(index) = block_fro2.iter().position(|&w| !(w > 0.0)) {
        return Err(Error::DegenerateBlock { side, index });
    }
    if !(total_fro2 > 0.0) || !total_fro2.is_finite() {
        return Err(Error::InvalidArgument(format!("total weight {total_fro2} must be positive")));
    }
    let weights: Vec<f64> = block_fro2.iter().map(|w| w / total_fro2).collect();
    let mut acc = 0.0;
    let cumulative = weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    Ok(BlockSampler { weights, cumulative })
}

impl BlockSampler {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Smallest index whose cumulative weight exceeds `u`.
    ///
    /// Rounding can leave the last cumulative entry a hair below 1; draws
    /// beyond it map to the last block.
    pub fn index_for(&self, u: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1)
    }

    pub fn sample(&self, rng: &mut RandomStream) -> usize {
        self.index_for(rng.uniform())
    }
}
