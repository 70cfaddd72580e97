use crate::bregman::{ConvexFunction, DualPrimalPair};
use crate::rng::RandomStream;

/// Iterates of the extended scheme.
///
/// `x*` starts at 0 and only ever moves along rows of `A`, so it stays in
/// `R(A^T)`; `z*` starts at `b` and only moves along columns, so `z* - b`
/// stays in `R(A)`.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub(crate) x: DualPrimalPair,
    pub(crate) z: DualPrimalPair,
    pub(crate) iter: u64,
    pub(crate) rng: RandomStream,
}

impl SolverState {
    /// `x* = 0`, `x = ∇f*(0)`, `z* = b`, `z = ∇g*(b)`.
    pub fn initial(f: &ConvexFunction, g: &ConvexFunction, b: &[f64], n: usize, seed: u64) -> Self {
        Self {
            x: DualPrimalPair::new(f, vec![0.0; n]),
            z: DualPrimalPair::new(g, b.to_vec()),
            iter: 0,
            rng: RandomStream::new(seed),
        }
    }

    pub fn x_star(&self) -> &[f64] {
        self.x.dual()
    }

    pub fn x(&self) -> &[f64] {
        self.x.primal()
    }

    pub fn z_star(&self) -> &[f64] {
        self.z.dual()
    }

    pub fn z(&self) -> &[f64] {
        self.z.primal()
    }

    pub fn iter(&self) -> u64 {
        self.iter
    }

    pub fn rng_mut(&mut self) -> &mut RandomStream {
        &mut self.rng
    }
}
