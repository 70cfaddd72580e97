//! Strongly convex objectives, their conjugates, and Bregman distances.
//!
//! Iterates always carry the dual variable explicitly; primal points are
//! recovered through the conjugate-gradient map and never drift from it.

use crate::error::{invalid, Error, Result};
use crate::linalg::dot;

/// Tolerance used when checking that a primal point matches its dual.
pub const PAIR_TOL: f64 = 1e-10;

/// The two objectives the solvers support.
///
/// - `SquaredNorm`: `f(x) = ½‖x‖²`, `∇f* = id`.
/// - `L1PlusHalfSquared`: `f(x) = λ‖x‖₁ + ½‖x‖²`, `∇f* = S_λ`.
///
/// Both are 1-strongly convex with a 1-Lipschitz conjugate gradient. Other
/// objectives would slot in as further variants providing `eval`,
/// `eval_conj` and `grad_conj_into` with their own moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexFunction {
    SquaredNorm,
    L1PlusHalfSquared { lambda: f64 },
}

impl ConvexFunction {
    pub fn l1_plus_half_squared(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(invalid(format!("sparsity weight must be finite and >= 0, got {lambda}")));
        }
        Ok(Self::L1PlusHalfSquared { lambda })
    }

    /// Strong-convexity modulus.
    pub fn mu(&self) -> f64 {
        1.0
    }

    /// Lipschitz constant of `∇f*`.
    pub fn lipschitz_grad_conj(&self) -> f64 {
        1.0
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            Self::SquaredNorm => 0.0,
            Self::L1PlusHalfSquared { lambda } => lambda,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let half_sq = 0.5 * dot(x, x);
        match *self {
            Self::SquaredNorm => half_sq,
            Self::L1PlusHalfSquared { lambda } => lambda * x.iter().map(|v| v.abs()).sum::<f64>() + half_sq,
        }
    }

    pub fn eval_conj(&self, dual: &[f64]) -> f64 {
        match *self {
            Self::SquaredNorm => 0.5 * dot(dual, dual),
            Self::L1PlusHalfSquared { lambda } => {
                0.5 * dual.iter().map(|&v| shrink(v, lambda)).map(|s| s * s).sum::<f64>()
            }
        }
    }

    pub fn grad_conj(&self, dual: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; dual.len()];
        self.grad_conj_into(dual, &mut out);
        out
    }

    pub fn grad_conj_into(&self, dual: &[f64], out: &mut [f64]) {
        debug_assert_eq!(dual.len(), out.len());
        match *self {
            Self::SquaredNorm => out.copy_from_slice(dual),
            Self::L1PlusHalfSquared { lambda } => {
                for (o, &d) in out.iter_mut().zip(dual) {
                    *o = shrink(d, lambda);
                }
            }
        }
    }
}

#[inline]
fn shrink(v: f64, lambda: f64) -> f64 {
    let a = v.abs() - lambda;
    if a > 0.0 {
        a.copysign(v)
    } else {
        0.0
    }
}

/// Componentwise soft shrinkage `max(|x_j| - λ, 0) · sign(x_j)`.
pub fn soft_threshold(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(invalid(format!("threshold must be >= 0, got {lambda}")));
    }
    Ok(x.iter().map(|&v| shrink(v, lambda)).collect())
}

pub fn grad_conj(f: &ConvexFunction, dual: &[f64]) -> Vec<f64> {
    f.grad_conj(dual)
}

pub fn eval(f: &ConvexFunction, x: &[f64]) -> f64 {
    f.eval(x)
}

pub fn eval_conj(f: &ConvexFunction, dual: &[f64]) -> f64 {
    f.eval_conj(dual)
}

/// `D_f^{dual}(x, y) = f*(dual) - <dual, y> + f(y)`, requiring `x = ∇f*(dual)`.
pub fn bregman_distance(f: &ConvexFunction, dual: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
    if dual.len() != x.len() || x.len() != y.len() {
        return Err(invalid("bregman_distance dimension mismatch"));
    }
    let expected = f.grad_conj(dual);
    let dev = expected.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if dev > PAIR_TOL {
        return Err(Error::InconsistentPair(dev));
    }
    // Clamp tiny negative values from cancellation.
    Ok((f.eval_conj(dual) - dot(dual, y) + f.eval(y)).max(0.0))
}

/// `h(z) = g(z) - <b, z>`.
pub fn dual_objective(g: &ConvexFunction, b: &[f64], z: &[f64]) -> Result<f64> {
    if b.len() != z.len() {
        return Err(invalid(format!("dual_objective: |b| = {} but |z| = {}", b.len(), z.len())));
    }
    Ok(g.eval(z) - dot(b, z))
}

/// A dual iterate and the primal point `∇f*(dual)` derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPrimalPair {
    dual: Vec<f64>,
    primal: Vec<f64>,
}

impl DualPrimalPair {
    pub fn new(f: &ConvexFunction, dual: Vec<f64>) -> Self {
        let primal = f.grad_conj(&dual);
        Self { dual, primal }
    }

    pub fn dual(&self) -> &[f64] {
        &self.dual
    }

    pub fn primal(&self) -> &[f64] {
        &self.primal
    }

    /// Mutate the dual, then recompute the primal.
    pub fn update(&mut self, f: &ConvexFunction, apply: impl FnOnce(&mut [f64])) {
        self.update_with(f, |dual, _| apply(dual));
    }

    /// Like [`update`](Self::update), but the closure also sees the primal
    /// point from before the update.
    pub fn update_with(&mut self, f: &ConvexFunction, apply: impl FnOnce(&mut [f64], &[f64])) {
        apply(&mut self.dual, &self.primal);
        f.grad_conj_into(&self.dual, &mut self.primal);
    }
}
