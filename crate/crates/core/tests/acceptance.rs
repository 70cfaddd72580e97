//! End-to-end acceptance checks. Runs as a plain binary (no libtest
//! harness), prints one PASS/FAIL line per check and exits non-zero if any
//! check fails or exceeds its time limit.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use bregman_kaczmarz::bregman::{bregman_distance, soft_threshold, ConvexFunction};
use bregman_kaczmarz::harness::{
    contraction_factors, run_experiment, theory_inputs, theta_hat, ExperimentResults, ExperimentSpec, InstanceSource,
};
use bregman_kaczmarz::linalg::{analyze, DenseMatrix, Side};
use bregman_kaczmarz::problems::{
    build_instance, gen_gaussian, gen_sparse_solution, gen_structured, InstanceParams, MatrixKind,
};
use bregman_kaczmarz::rng::RandomStream;
use bregman_kaczmarz::solvers::{run, Relaxation, Solver, SolverConfig, SolverVariant};
use common::{diff_norm, norm, svd_values, RangeProjectors, ReferenceRebk, ReferenceRek};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit_config(f: ConvexFunction, seed: u64) -> SolverConfig {
    SolverConfig {
        variant: SolverVariant::RRabebk,
        tau: 1,
        relaxation: Relaxation::Explicit { alpha_z: 1.0, alpha_x: 1.0 },
        f,
        g: ConvexFunction::SquaredNorm,
        seed,
        ..SolverConfig::default()
    }
}

fn reduction_equivalence() -> Outcome {
    let inst = build_instance(&InstanceParams::gaussian(30, 20).with_seed(20)).unwrap();
    let pm = analyze(inst.a.clone(), 1).unwrap();
    let iters = 10_000;
    for lambda in [5.0, 0.5] {
        let f = ConvexFunction::l1_plus_half_squared(lambda).unwrap();
        let mut solver = Solver::new(&pm, &inst.b, &unit_config(f, 3)).unwrap();
        let mut oracle = ReferenceRebk::new(&inst.a, &inst.b, Some(lambda), 3);
        for k in 0..iters {
            solver.step();
            oracle.step();
            let st = solver.state();
            ensure(st.x_star() == oracle.x_star.as_slice() && st.z_star() == oracle.z_star.as_slice(), || {
                format!("lambda {lambda}: sequences differ at iteration {k}")
            })?;
        }
    }
    let mut solver = Solver::new(&pm, &inst.b, &unit_config(ConvexFunction::SquaredNorm, 4)).unwrap();
    let mut oracle = ReferenceRek::new(&inst.a, &inst.b, 4);
    for k in 0..iters {
        solver.step();
        oracle.step();
        ensure(solver.state().x_star() == oracle.x() && solver.state().z_star() == oracle.z(), || {
            format!("randomized extended Kaczmarz differs at iteration {k}")
        })?;
    }
    Ok(format!("{iters} iterations bit-identical (l1 weights 5 and 0.5, and Euclidean)"))
}

fn subspace_invariants() -> Outcome {
    let mut dims = RandomStream::new(77);
    let (mut worst_z, mut worst_x) = (0.0f64, 0.0f64);
    for k in 0..20u64 {
        let m = 5 + (dims.uniform() * 56.0) as usize;
        let n = 5 + (dims.uniform() * 56.0) as usize;
        let (m, n) = (m.min(60), n.min(60));
        let tau = 1 + (dims.uniform() * 20.0) as usize;
        let kind = if k % 2 == 0 { MatrixKind::Gaussian } else { MatrixKind::Bernoulli };
        let inst = build_instance(&InstanceParams::new(kind, m, n).with_seed(k).with_lambda(1.0)).unwrap();
        let pm = analyze(inst.a.clone(), tau).unwrap();
        let proj = RangeProjectors::new(&inst.a);
        let cfg = SolverConfig {
            tau,
            relaxation: Relaxation::Shared { multiplier: [1.0, 1.75][k as usize % 2] },
            f: ConvexFunction::l1_plus_half_squared(1.0).unwrap(),
            seed: k,
            ..SolverConfig::default()
        };
        let mut solver = Solver::new(&pm, &inst.b, &cfg).unwrap();
        for it in 1..=3000 {
            solver.step();
            if it % 100 != 0 {
                continue;
            }
            let st = solver.state();
            let dz: Vec<f64> = st.z_star().iter().zip(&inst.b).map(|(z, b)| z - b).collect();
            if norm(&dz) > 0.0 {
                worst_z = worst_z.max(norm(&proj.left_null_part(&dz)) / norm(&dz));
            }
            worst_x = worst_x.max(norm(&proj.null_part(st.x_star())) / norm(st.x_star()).max(1.0));
        }
    }
    ensure(worst_z <= 1e-8 && worst_x <= 1e-8, || format!("worst ratios z {worst_z:.2e}, x {worst_x:.2e}"))?;
    Ok(format!("20 instances, worst ratios z {worst_z:.2e}, x {worst_x:.2e}"))
}

fn noise_immune_recovery() -> Outcome {
    let mut hits = 0;
    let mut worst_z = 0.0f64;
    let mut errs = Vec::new();
    for seed in 0..10u64 {
        let inst = build_instance(&InstanceParams::gaussian(200, 100).with_seed(1000 + seed)).unwrap();
        ensure(inst.metadata.noise_applied, || "noise was not applied".into())?;
        // standard stopping rule ERR < 1e-5; success is ERR < 1e-4 within the budget
        let cfg = SolverConfig {
            max_iters: 500_000,
            checkpoint_every: 10,
            seed,
            ..SolverConfig::default()
        };
        let pm = analyze(inst.a.clone(), cfg.tau).unwrap();
        let out = run(&pm, &inst.b, &cfg, Some(&inst.x_hat)).unwrap();
        let err = out.final_relative_error().unwrap();
        errs.push(err);
        if err < 1e-4 {
            hits += 1;
        }
        // z* should approach b - A x̂ = e
        worst_z = worst_z.max(diff_norm(out.state.z_star(), &inst.e) / norm(&inst.b));
    }
    ensure(hits >= 9, || format!("only {hits}/10 reached ERR < 1e-4: {errs:.2?}"))?;
    ensure(worst_z < 1e-3, || format!("worst ‖z* - (b - A x̂)‖/‖b‖ = {worst_z:.2e}"))?;
    Ok(format!("{hits}/10 recovered, worst ‖z* - (b - A x̂)‖/‖b‖ = {worst_z:.2e}"))
}

fn experiment(kind: MatrixKind, m: usize, n: usize, solvers: &str, trials: usize, seed: u64) -> ExperimentResults {
    let mut spec = ExperimentSpec::new(
        InstanceSource::Generated(InstanceParams::new(kind, m, n)),
        solvers.split(',').map(|s| s.parse().unwrap()).collect(),
    );
    spec.trials = trials;
    spec.seed = seed;
    spec.checkpoint_every = 10;
    run_experiment(&spec, None).unwrap()
}

fn speed_ordering() -> Outcome {
    let mut details = Vec::new();
    for (m, n) in [(200, 100), (100, 200)] {
        let res = experiment(MatrixKind::Gaussian, m, n, "REBK,rRABEBK-1,rRABEBK-1.75", 10, 2024);
        let it = |label: &str| res.summary_for(label).unwrap().median_iterations;
        let (rebk, one, fast) = (it("REBK"), it("rRABEBK-1"), it("rRABEBK-1.75"));
        let all_converged = res.summary.iter().all(|s| s.converged == 10);
        details.push(format!("{m}x{n}: REBK {rebk}, 1 {one}, 1.75 {fast}"));
        ensure(all_converged, || format!("{m}x{n}: not every run converged"))?;
        ensure(fast < one && one < 0.5 * rebk, || details.join("; "))?;
    }
    Ok(format!("median IT {}", details.join("; ")))
}

fn sparsity_necessity() -> Outcome {
    let mut details = Vec::new();
    for seed in 0..3u64 {
        let inst = build_instance(&InstanceParams::bernoulli(100, 200).with_seed(300 + seed)).unwrap();
        let pm = analyze(inst.a.clone(), 20).unwrap();
        let mut errs = [0.0; 2];
        for (slot, variant) in [SolverVariant::Rabek, SolverVariant::RRabebk].into_iter().enumerate() {
            let cfg = SolverConfig {
                variant,
                tolerance: Some(1e-4),
                max_iters: 100_000,
                checkpoint_every: 10,
                seed,
                ..SolverConfig::default()
            };
            errs[slot] = run(&pm, &inst.b, &cfg, Some(&inst.x_hat)).unwrap().final_relative_error().unwrap();
        }
        details.push(format!("RABEK {:.3}, rRABEBK-1 {:.1e}", errs[0], errs[1]));
        ensure(errs[0] > 0.1 && errs[1] < 1e-4, || format!("seed {seed}: {}", details.last().unwrap()))?;
    }
    Ok(details.join("; "))
}

/// Instance with `x̂` the minimizer of `λ‖x‖₁ + ½‖x‖²` on `{A x = A x̂}`:
/// full column rank, or `x̂ = S_λ(Aᵀ w)` so `Aᵀ w ∈ ∂f(x̂)`.
fn error_bound_instance(k: u64, rng: &mut RandomStream) -> (DenseMatrix, Vec<f64>, f64) {
    let n = 2 + (rng.uniform() * 9.0) as usize;
    let lambda = [0.5, 1.0, 2.0, 5.0][k as usize % 4];
    if k % 2 == 0 {
        let m = n + (rng.uniform() * 5.0) as usize;
        let a = gen_gaussian(m, n, 500 + k).unwrap();
        let nnz = 1 + (rng.uniform() * n as f64) as usize;
        (a, gen_sparse_solution(n, nnz.min(n), 600 + k).unwrap(), lambda)
    } else {
        let m = 1 + (rng.uniform() * (n - 1) as f64) as usize;
        let a = gen_gaussian(m, n, 500 + k).unwrap();
        let w: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
        let atw = a.mul_t_vec(&w);
        let top = atw.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let scale = lambda * (1.2 + rng.uniform()) / top;
        let dual: Vec<f64> = atw.iter().map(|v| v * scale).collect();
        (a, soft_threshold(&dual, lambda).unwrap(), lambda)
    }
}

fn error_bound_constant() -> Outcome {
    let mut rng = RandomStream::new(6);
    let mut worst_ratio = 0.0f64;
    let mut violations = 0;
    for k in 0..20u64 {
        let (a, x_hat, lambda) = error_bound_instance(k, &mut rng);
        let f = ConvexFunction::l1_plus_half_squared(lambda).unwrap();
        let inv_theta = theta_hat(&a, &x_hat, lambda).unwrap();
        let y_hat = a.mul_vec(&x_hat);
        for _ in 0..100 {
            let w: Vec<f64> = (0..a.rows()).map(|_| rng.normal()).collect();
            let atw = a.mul_t_vec(&w);
            let top = atw.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
            let scale = lambda * 3.0 * rng.uniform() / top;
            let x_star: Vec<f64> = atw.iter().map(|v| v * scale).collect();
            let x = f.grad_conj(&x_star);
            let d = bregman_distance(&f, &x_star, &x, &x_hat).unwrap();
            let r2: f64 = a.mul_vec(&x).iter().zip(&y_hat).map(|(u, v)| (u - v) * (u - v)).sum();
            let bound = inv_theta * r2;
            if d > bound + 1e-10 {
                violations += 1;
            }
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(d / bound);
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations, worst D/bound {worst_ratio:.3}"))?;
    Ok(format!("2000 points, no violations, worst D/bound {worst_ratio:.3}"))
}

fn contraction_bound() -> Outcome {
    let lambda = 0.5;
    let inst = build_instance(&InstanceParams::gaussian(10, 6).with_seed(7).with_nnz(2).with_lambda(lambda).with_q(1.0))
        .unwrap();
    let tau = 3;
    let pm = analyze(inst.a.clone(), tau).unwrap();
    let (alpha_z, alpha_x) = (1.0 / pm.beta_max(Side::Col), 1.0 / pm.beta_max(Side::Row));
    let inputs = theory_inputs(&inst.a, &inst.x_hat, lambda).unwrap();
    let constants = contraction_factors(&pm, &inputs, alpha_z, alpha_x).unwrap();
    ensure(constants.warnings.is_empty(), || format!("{:?}", constants.warnings))?;

    let f = ConvexFunction::l1_plus_half_squared(lambda).unwrap();
    let steps = 200;
    let mut mean_d = vec![0.0; steps + 1];
    let seeds = 200;
    for seed in 0..seeds {
        let cfg = SolverConfig {
            tau,
            relaxation: Relaxation::Explicit { alpha_z, alpha_x },
            f,
            seed,
            ..SolverConfig::default()
        };
        let mut solver = Solver::new(&pm, &inst.b, &cfg).unwrap();
        for (k, slot) in mean_d.iter_mut().enumerate() {
            if k > 0 {
                solver.step();
            }
            let st = solver.state();
            *slot += bregman_distance(&f, st.x_star(), st.x(), &inst.x_hat).unwrap() / seeds as f64;
        }
    }
    ensure(mean_d[0] > 0.0 && mean_d[steps] > 0.0, || format!("degenerate distances {mean_d:?}"))?;
    let observed = (mean_d[steps] / mean_d[0]).powf(1.0 / steps as f64);
    let factor = constants.contraction_x;
    ensure(observed <= factor + 0.05, || format!("observed decay {observed:.6} vs factor {factor:.6}"))?;
    Ok(format!("observed per-iteration decay {observed:.6}, theoretical factor {factor:.6}"))
}

fn bregman_properties() -> Outcome {
    let mut rng = RandomStream::new(8);
    let (mut worst_gap, mut worst_lower, mut worst_lip) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..10_000 {
        let dim = 1 + (rng.uniform() * 10.0) as usize;
        let f = if k % 5 == 0 {
            ConvexFunction::SquaredNorm
        } else {
            ConvexFunction::l1_plus_half_squared(5.0 * rng.uniform()).unwrap()
        };
        let scale = 10.0 * rng.uniform();
        let x_star: Vec<f64> = (0..dim).map(|_| scale * rng.normal()).collect();
        let y: Vec<f64> = (0..dim).map(|_| scale * rng.normal()).collect();
        let u: Vec<f64> = (0..dim).map(|_| scale * rng.normal()).collect();
        let x = f.grad_conj(&x_star);
        let inner: f64 = x_star.iter().zip(&x).map(|(a, b)| a * b).sum();
        let gap = (f.eval(&x) + f.eval_conj(&x_star) - inner).abs();
        worst_gap = worst_gap.max(gap);
        let d = bregman_distance(&f, &x_star, &x, &y).unwrap();
        let lower = 0.5 * f.mu() * diff_norm(&x, &y).powi(2);
        worst_lower = worst_lower.max(lower - d);
        let lam = f.lambda();
        let su = soft_threshold(&u, lam).unwrap();
        let sx = soft_threshold(&x_star, lam).unwrap();
        worst_lip = worst_lip.max(diff_norm(&su, &sx) - diff_norm(&u, &x_star));
    }
    ensure(worst_gap <= 1e-10, || format!("Fenchel-Young gap {worst_gap:.2e}"))?;
    ensure(worst_lower <= 1e-10, || format!("lower bound violated by {worst_lower:.2e}"))?;
    ensure(worst_lip <= 1e-12, || format!("shrinkage expands distances by {worst_lip:.2e}"))?;
    Ok(format!("10000 triples, worst gap {worst_gap:.1e}, worst lower-bound excess {worst_lower:.1e}"))
}

fn image_ordering() -> Outcome {
    let mut spec = ExperimentSpec::new(
        InstanceSource::Image { path: None, rows: 300, q: 5.0, lambda: 5.0 },
        "REBK,rRABEBK-1,rRABEBK-1.75".split(',').map(|s| s.parse().unwrap()).collect(),
    );
    spec.trials = 3;
    spec.seed = 31;
    spec.tolerance = None;
    spec.max_iters = 10_000;
    spec.checkpoint_every = 1000;
    let res = run_experiment(&spec, None).unwrap();
    let mut ok = 0;
    let mut details = Vec::new();
    for trial in 0..3 {
        let p = |label: &str| {
            res.runs.iter().find(|r| r.trial == trial && r.solver == label).and_then(|r| r.psnr).unwrap()
        };
        let (rebk, one, fast) = (p("REBK"), p("rRABEBK-1"), p("rRABEBK-1.75"));
        details.push(format!("{rebk:.3}/{one:.3}/{fast:.3}"));
        if fast > one && one > rebk {
            ok += 1;
        }
    }
    let text = format!("PSNR REBK/1/1.75 per trial: {}", details.join(", "));
    ensure(ok >= 2, || format!("ordering held in {ok}/3 trials; {text}"))?;
    Ok(format!("ordering held in {ok}/3 trials; {text}"))
}

fn structured_conditioning() -> Outcome {
    let mut rng = RandomStream::new(10);
    let mut worst = 0.0f64;
    for k in 0..50u64 {
        let m = 5 + (rng.uniform() * 76.0) as usize;
        let n = 5 + (rng.uniform() * 76.0) as usize;
        let rank = 1 + (rng.uniform() * m.min(n) as f64) as usize;
        let rank = rank.min(m.min(n));
        let kappa = 1.5 + 98.5 * rng.uniform();
        let a = gen_structured(m, n, rank, kappa, 900 + k).unwrap();
        let s = svd_values(&a);
        let numerical_rank = s.iter().filter(|&&v| v > 1e-8 * s[0]).count();
        ensure(numerical_rank == rank, || format!("{m}x{n}: rank {numerical_rank}, requested {rank}"))?;
        let cond = s[0] / s[rank - 1];
        worst = worst.max(cond / kappa);
        ensure(cond <= kappa * (1.0 + 1e-8), || format!("{m}x{n} rank {rank}: condition {cond} > {kappa}"))?;
    }
    Ok(format!("50 matrices, worst condition/kappa {worst:.4}"))
}

fn main() {
    let checks: [(u32, &str, u64, fn() -> Outcome); 10] = [
        (1, "reduction equivalence", 5, reduction_equivalence),
        (2, "subspace invariants", 10, subspace_invariants),
        (3, "noise-immune recovery", 60, noise_immune_recovery),
        (4, "speed ordering", 300, speed_ordering),
        (5, "sparsity necessity", 60, sparsity_necessity),
        (6, "error-bound constant", 60, error_bound_constant),
        (7, "contraction bound", 120, contraction_bound),
        (8, "Bregman/conjugate properties", 5, bregman_properties),
        (9, "image recovery ordering", 120, image_ordering),
        (10, "structured conditioning", 30, structured_conditioning),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, limit, check) in checks {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || f == &id.to_string()) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_secs(limit) => Err(format!("{d}; exceeded time limit")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {id:>2} {name} ({:.2} s, limit {limit} s): {detail}", elapsed.as_secs_f64());
    }
    println!("acceptance: {}/{ran} passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
