use crate::bregman::ConvexFunction;
use crate::linalg::{dot, BlockSampler, PartitionedMatrix, Side};

use super::state::SolverState;

/// Column-block step on the auxiliary variable:
/// `z* ← z* - α_z / ‖A_J‖_F² · A_J A_Jᵀ z`, then `z ← ∇g*(z*)`.
///
/// Returns the sampled block index.
pub fn z_step(
    pm: &PartitionedMatrix,
    state: &mut SolverState,
    g: &ConvexFunction,
    alpha_z: f64,
    sampler_cols: &BlockSampler,
) -> usize {
    let j = sampler_cols.sample(&mut state.rng);
    let block = pm.partition(Side::Col).block(j);
    let fro2 = pm.block_fro2(Side::Col)[j];
    let a = pm.matrix();
    state.z.update_with(g, |z_star, z| {
        for l in block {
            let col = a.col(l);
            let c = alpha_z * dot(col, z) / fro2;
            for (zs, ai) in z_star.iter_mut().zip(col) {
                *zs -= c * ai;
            }
        }
    });
    j
}

/// Row-block step on the primary variable:
/// `x* ← x* - α_x / ‖A_I‖_F² · A_Iᵀ (A_I x - b_I + z*_I)`, then `x ← ∇f*(x*)`.
///
/// Reads the `z*` left by this iteration's [`z_step`].
pub fn x_step(
    pm: &PartitionedMatrix,
    state: &mut SolverState,
    f: &ConvexFunction,
    b: &[f64],
    alpha_x: f64,
    sampler_rows: &BlockSampler,
) -> usize {
    let i = sampler_rows.sample(&mut state.rng);
    let block = pm.partition(Side::Row).block(i);
    let fro2 = pm.block_fro2(Side::Row)[i];
    let a = pm.matrix();
    let z_star = state.z.dual();
    state.x.update_with(f, |x_star, x| {
        for q in block {
            let row = a.row(q);
            let c = alpha_x * (dot(row, x) - b[q] + z_star[q]) / fro2;
            for (xs, aj) in x_star.iter_mut().zip(row) {
                *xs -= c * aj;
            }
        }
    });
    i
}

/// One single-index extended Bregman-Kaczmarz step.
///
/// `col_sampler` and `row_sampler` range over individual columns and rows
/// with probabilities `‖A_{:,j}‖² / ‖A‖_F²` and `‖A_{i,:}‖² / ‖A‖_F²`.
/// With `f = g = ½‖·‖²` this is the randomized extended Kaczmarz step.
pub fn rebk_step(
    pm: &PartitionedMatrix,
    state: &mut SolverState,
    f: &ConvexFunction,
    g: &ConvexFunction,
    b: &[f64],
    col_sampler: &BlockSampler,
    row_sampler: &BlockSampler,
) -> (usize, usize) {
    let a = pm.matrix();
    let j = col_sampler.sample(&mut state.rng);
    let col = a.col(j);
    let col_norm2 = pm.col_norms2()[j];
    state.z.update_with(g, |z_star, z| {
        let step = dot(col, z) / col_norm2;
        for (zs, ai) in z_star.iter_mut().zip(col) {
            *zs -= step * ai;
        }
    });

    let i = row_sampler.sample(&mut state.rng);
    let row = a.row(i);
    let row_norm2 = pm.row_norms2()[i];
    let z_star = state.z.dual();
    state.x.update_with(f, |x_star, x| {
        let step = (dot(row, x) - b[i] + z_star[i]) / row_norm2;
        for (xs, aj) in x_star.iter_mut().zip(row) {
            *xs -= step * aj;
        }
    });
    (j, i)
}

/// Bregman-Kaczmarz projection onto the single hyperplane `A_i x = b_i`.
pub(crate) fn row_projection(pm: &PartitionedMatrix, state: &mut SolverState, f: &ConvexFunction, b: &[f64], i: usize) {
    let row = pm.matrix().row(i);
    let row_norm2 = pm.row_norms2()[i];
    state.x.update_with(f, |x_star, x| {
        let step = (b[i] - dot(row, x)) / row_norm2;
        for (xs, aj) in x_star.iter_mut().zip(row) {
            *xs += step * aj;
        }
    });
}
