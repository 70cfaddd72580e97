//! Kaczmarz-family step kernels and the iteration driver.
//!
//! The block engine implements the relaxed averaging block extended
//! Bregman-Kaczmarz iteration: each step draws a column block and relaxes
//! the auxiliary variable `z` toward `N(A^T)`, then draws a row block and
//! relaxes `x` toward `{x : A x = b - z*}` in the dual space, mapping back
//! through `∇f*`. The single-row variants (Kaczmarz, RK, BK, REK, REBK) are
//! coded separately so the block engine can be checked against them.

mod config;
mod driver;
mod kernels;
mod state;
mod variant;

pub use config::{resolve_relaxation, Relaxation, ResolvedRelaxation, SolverConfig};
pub use driver::{run, ConvergenceTrace, RunOutcome, Solver, StopReason, TraceRecord};
pub use kernels::{rebk_step, x_step, z_step};
pub use state::SolverState;
pub use variant::SolverVariant;
