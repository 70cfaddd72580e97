//! Seedable random stream shared by generators and solvers.
//!
//! The generator is fixed to ChaCha8. Replaying a seed reproduces every draw
//! bit-exactly within this implementation; no cross-implementation guarantee.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Stream for trial `trial` of an experiment seeded with `master`.
    ///
    /// Uses `master ^ trial` so trial seeds do not depend on scheduling order.
    pub fn for_trial(master: u64, trial: u64) -> Self {
        Self::new(master ^ trial)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn coin(&mut self) -> bool {
        self.inner.random::<bool>()
    }

    pub(crate) fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}
