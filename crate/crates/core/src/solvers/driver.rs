use std::time::Instant;

use crate::bregman::ConvexFunction;
use crate::error::{invalid, Result};
use crate::linalg::{make_sampler, norm2, BlockSampler, PartitionedMatrix, Side};

use super::config::{resolve_relaxation, ResolvedRelaxation, SolverConfig};
use super::kernels::{rebk_step, row_projection, x_step, z_step};
use super::state::SolverState;
use super::variant::SolverVariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIters,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: u64,
    /// `‖x_k - x̂‖ / ‖x̂‖`, when the ground truth is known.
    pub relative_error: Option<f64>,
    /// `‖A x_k - ŷ‖`, when the ground truth is known.
    pub primal_residual: Option<f64>,
    /// `‖Aᵀ z_k‖`; absent for variants without the auxiliary update.
    pub dual_residual: Option<f64>,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// CSV with header `iter,err,primal_res,dual_res,elapsed_s`; missing
    /// values are written as `nan`.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| format!("{x:.10e}"));
        let mut out = String::from("iter,err,primal_res,dual_res,elapsed_s\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{:.6}\n",
                r.iter,
                opt(r.relative_error),
                opt(r.primal_residual),
                opt(r.dual_residual),
                r.elapsed_seconds
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SolverState,
    pub trace: ConvergenceTrace,
    pub stop: StopReason,
    pub relaxation: ResolvedRelaxation,
    /// Wall time of the iteration loop only.
    pub elapsed_seconds: f64,
}

impl RunOutcome {
    pub fn iterations(&self) -> u64 {
        self.state.iter
    }

    pub fn final_relative_error(&self) -> Option<f64> {
        self.trace.last().and_then(|r| r.relative_error)
    }
}

enum Engine {
    Block,
    SingleExtended { cols: BlockSampler, rows: BlockSampler },
    SingleRandom { rows: BlockSampler },
    Cyclic,
}

/// A configured solver over one analyzed matrix and right-hand side.
///
/// [`run`] drives it to termination; [`Solver::step`] exposes single
/// iterations for callers that inspect every iterate.
pub struct Solver<'a> {
    pm: &'a PartitionedMatrix,
    b: &'a [f64],
    f: ConvexFunction,
    g: ConvexFunction,
    variant: SolverVariant,
    relaxation: ResolvedRelaxation,
    engine: Engine,
    state: SolverState,
}

impl<'a> Solver<'a> {
    pub fn new(pm: &'a PartitionedMatrix, b: &'a [f64], cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if b.len() != pm.rows() {
            return Err(invalid(format!("rhs has length {}, matrix has {} rows", b.len(), pm.rows())));
        }
        let f = cfg.effective_f();
        let g = cfg.effective_g();
        let variant = cfg.variant;
        if variant.is_block() {
            let (m, n) = (pm.rows(), pm.cols());
            let rows_tau = pm.partition(Side::Row).block_size();
            let cols_tau = pm.partition(Side::Col).block_size();
            if rows_tau != cfg.tau.min(m) || cols_tau != cfg.tau.min(n) {
                return Err(invalid(format!(
                    "matrix analyzed with block sizes ({rows_tau}, {cols_tau}) but config asks for tau = {}",
                    cfg.tau
                )));
            }
        }
        let relaxation = resolve_relaxation(pm, cfg, f.mu(), g.mu())?;
        let total = pm.total_fro2();
        let engine = match variant {
            SolverVariant::Kaczmarz => Engine::Cyclic,
            SolverVariant::Rk | SolverVariant::Bk => {
                Engine::SingleRandom { rows: make_sampler(pm.row_norms2(), total, "row")? }
            }
            SolverVariant::Rek | SolverVariant::Rebk => Engine::SingleExtended {
                cols: make_sampler(pm.col_norms2(), total, "column")?,
                rows: make_sampler(pm.row_norms2(), total, "row")?,
            },
            SolverVariant::Rabek | SolverVariant::Rabebk | SolverVariant::RRabebk => Engine::Block,
        };
        let state = SolverState::initial(&f, &g, b, pm.cols(), cfg.seed);
        Ok(Self { pm, b, f, g, variant, relaxation, engine, state })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn relaxation(&self) -> &ResolvedRelaxation {
        &self.relaxation
    }

    pub fn variant(&self) -> SolverVariant {
        self.variant
    }

    pub fn into_state(self) -> SolverState {
        self.state
    }

    /// One full iteration (auxiliary step first, then primary step).
    pub fn step(&mut self) {
        let (pm, b) = (self.pm, self.b);
        match &self.engine {
            Engine::Block => {
                z_step(pm, &mut self.state, &self.g, self.relaxation.alpha_z, pm.sampler(Side::Col));
                x_step(pm, &mut self.state, &self.f, b, self.relaxation.alpha_x, pm.sampler(Side::Row));
            }
            Engine::SingleExtended { cols, rows } => {
                rebk_step(pm, &mut self.state, &self.f, &self.g, b, cols, rows);
            }
            Engine::SingleRandom { rows } => {
                let i = rows.sample(&mut self.state.rng);
                row_projection(pm, &mut self.state, &self.f, b, i);
            }
            Engine::Cyclic => {
                let i = (self.state.iter % pm.rows() as u64) as usize;
                row_projection(pm, &mut self.state, &self.f, b, i);
            }
        }
        self.state.iter += 1;
    }
}

struct Metrics<'a> {
    pm: &'a PartitionedMatrix,
    b: &'a [f64],
    extended: bool,
    truth: Option<(&'a [f64], f64, Vec<f64>)>,
    b_norm: f64,
    a_fro: f64,
}

impl<'a> Metrics<'a> {
    fn record(&self, st: &SolverState, elapsed: f64) -> TraceRecord {
        let a = self.pm.matrix();
        let (relative_error, primal_residual) = match &self.truth {
            Some((x_hat, x_hat_norm, y_hat)) => {
                let err = st.x().iter().zip(*x_hat).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
                let ax = a.mul_vec(st.x());
                let res = ax.iter().zip(y_hat).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
                (Some(err / x_hat_norm), Some(res))
            }
            None => (None, None),
        };
        let dual_residual = self.extended.then(|| norm2(&a.mul_t_vec(st.z())));
        TraceRecord { iter: st.iter, relative_error, primal_residual, dual_residual, elapsed_seconds: elapsed }
    }

    /// Ground truth: relative error. Otherwise the residuals of the two
    /// consistent subsystems `A x = b - z*` and `Aᵀ z = 0`.
    fn converged(&self, st: &SolverState, rec: &TraceRecord, tol: f64) -> bool {
        if let Some(err) = rec.relative_error {
            return err < tol;
        }
        let a = self.pm.matrix();
        let ax = a.mul_vec(st.x());
        let scale = if self.b_norm > 0.0 { self.b_norm } else { 1.0 };
        if self.extended {
            let res = ax
                .iter()
                .zip(self.b)
                .zip(st.z_star())
                .map(|((u, bi), zi)| {
                    let r = u - (bi - zi);
                    r * r
                })
                .sum::<f64>()
                .sqrt();
            rec.dual_residual.unwrap_or(0.0) / self.a_fro + res / scale < tol
        } else {
            let res = ax.iter().zip(self.b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
            res / scale < tol
        }
    }
}

/// Runs `cfg` on `(pm, b)` until the tolerance is met or the budget runs out.
///
/// With `ground_truth` the stopping rule is `‖x_k - x̂‖/‖x̂‖ < tol`; without
/// it, `‖Aᵀz‖/‖A‖_F + ‖A x - (b - z*)‖/‖b‖ < tol`. Both are evaluated only
/// at checkpoints, so reported iteration counts are multiples of
/// `checkpoint_every` unless the budget ends first.
pub fn run(
    pm: &PartitionedMatrix,
    b: &[f64],
    cfg: &SolverConfig,
    ground_truth: Option<&[f64]>,
) -> Result<RunOutcome> {
    let mut solver = Solver::new(pm, b, cfg)?;
    let truth = match ground_truth {
        Some(x_hat) => {
            if x_hat.len() != pm.cols() {
                return Err(invalid(format!(
                    "ground truth has length {}, matrix has {} columns",
                    x_hat.len(),
                    pm.cols()
                )));
            }
            let nrm = norm2(x_hat);
            if nrm == 0.0 {
                return Err(invalid("ground truth is zero; relative error undefined"));
            }
            Some((x_hat, nrm, pm.matrix().mul_vec(x_hat)))
        }
        None => None,
    };
    let metrics = Metrics {
        pm,
        b,
        extended: cfg.variant.is_extended(),
        truth,
        b_norm: norm2(b),
        a_fro: pm.total_fro2().sqrt(),
    };

    let mut trace = ConvergenceTrace::default();
    let start = Instant::now();
    trace.records.push(metrics.record(solver.state(), 0.0));
    let mut stop = StopReason::MaxIters;
    while solver.state().iter < cfg.max_iters {
        solver.step();
        let k = solver.state().iter;
        if k % cfg.checkpoint_every == 0 {
            let rec = metrics.record(solver.state(), start.elapsed().as_secs_f64());
            trace.records.push(rec);
            if let Some(tol) = cfg.tolerance {
                if metrics.converged(solver.state(), &rec, tol) {
                    stop = StopReason::Converged;
                    break;
                }
            }
        }
    }
    let elapsed_seconds = start.elapsed().as_secs_f64();
    if trace.last().map(|r| r.iter) != Some(solver.state().iter) {
        let rec = metrics.record(solver.state(), elapsed_seconds);
        trace.records.push(rec);
        if let Some(tol) = cfg.tolerance {
            if metrics.converged(solver.state(), &rec, tol) {
                stop = StopReason::Converged;
            }
        }
    }
    let relaxation = solver.relaxation().clone();
    Ok(RunOutcome { state: solver.into_state(), trace, stop, relaxation, elapsed_seconds })
}
