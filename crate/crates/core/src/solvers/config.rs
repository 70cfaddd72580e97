use log::warn;

use crate::bregman::ConvexFunction;
use crate::error::{invalid, Result};
use crate::linalg::{PartitionedMatrix, Side};

use super::variant::SolverVariant;

/// How the two relaxation parameters are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relaxation {
    /// Given directly.
    Explicit { alpha_z: f64, alpha_x: f64 },
    /// One step for both updates: `multiplier · μ / max(β^I_max, β^J_max)`.
    Shared { multiplier: f64 },
    /// `α_z = multiplier · μ_g / β^J_max`, `α_x = multiplier · μ_f / β^I_max`.
    PerSide { multiplier: f64 },
}

impl Default for Relaxation {
    fn default() -> Self {
        Self::Shared { multiplier: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: SolverVariant,
    pub tau: usize,
    pub relaxation: Relaxation,
    pub f: ConvexFunction,
    pub g: ConvexFunction,
    pub max_iters: u64,
    /// `None` runs the full iteration budget.
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub checkpoint_every: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            variant: SolverVariant::RRabebk,
            tau: 20,
            relaxation: Relaxation::default(),
            f: ConvexFunction::L1PlusHalfSquared { lambda: 5.0 },
            g: ConvexFunction::SquaredNorm,
            max_iters: 5_000_000,
            tolerance: Some(1e-5),
            seed: 0,
            checkpoint_every: 100,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(invalid("block size must be positive"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be positive"));
        }
        if self.checkpoint_every == 0 {
            return Err(invalid("checkpoint_every must be positive"));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(invalid(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Objective actually used for `x`.
    pub fn effective_f(&self) -> ConvexFunction {
        if self.variant.is_euclidean() {
            ConvexFunction::SquaredNorm
        } else {
            self.f
        }
    }

    /// Objective actually used for `z`.
    pub fn effective_g(&self) -> ConvexFunction {
        if self.variant.is_euclidean() {
            ConvexFunction::SquaredNorm
        } else {
            self.g
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRelaxation {
    pub alpha_z: f64,
    pub alpha_x: f64,
    /// Messages for parameters outside the windows where linear convergence
    /// is guaranteed. Already logged at warn level.
    pub warnings: Vec<String>,
}

/// Resolves `(α_z, α_x)` for `cfg`. Unit-step variants always get `(1, 1)`.
pub fn resolve_relaxation(
    pm: &PartitionedMatrix,
    cfg: &SolverConfig,
    mu_f: f64,
    mu_g: f64,
) -> Result<ResolvedRelaxation> {
    let beta_i = pm.beta_max(Side::Row);
    let beta_j = pm.beta_max(Side::Col);
    let (alpha_z, alpha_x) = if cfg.variant.has_unit_step() {
        (1.0, 1.0)
    } else {
        match cfg.relaxation {
            Relaxation::Explicit { alpha_z, alpha_x } => (alpha_z, alpha_x),
            Relaxation::Shared { multiplier } => {
                let beta = beta_i.max(beta_j);
                (multiplier * mu_g / beta, multiplier * mu_f / beta)
            }
            Relaxation::PerSide { multiplier } => (multiplier * mu_g / beta_j, multiplier * mu_f / beta_i),
        }
    };
    if !(alpha_z > 0.0) || !(alpha_x > 0.0) || !alpha_z.is_finite() || !alpha_x.is_finite() {
        return Err(invalid(format!(
            "relaxation parameters must be positive, got alpha_z={alpha_z}, alpha_x={alpha_x}"
        )));
    }

    let mut warnings = Vec::new();
    // Single-index variants see beta = 1 regardless of the partition.
    let (bi, bj) = if cfg.variant.is_block() { (beta_i, beta_j) } else { (1.0, 1.0) };
    if alpha_z >= 2.0 * mu_g / bj {
        warnings.push(format!(
            "alpha_z = {alpha_z} outside (0, 2*mu_g/beta_J_max) = (0, {}); z-sequence convergence not guaranteed",
            2.0 * mu_g / bj
        ));
    }
    if alpha_x > mu_f / bi {
        warnings.push(format!(
            "alpha_x = {alpha_x} exceeds mu_f/beta_I_max = {}; x-sequence rate bound does not apply",
            mu_f / bi
        ));
    }
    for w in &warnings {
        warn!("{w}");
    }
    Ok(ResolvedRelaxation { alpha_z, alpha_x, warnings })
}
