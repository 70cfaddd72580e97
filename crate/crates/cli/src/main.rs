use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use bregman_kaczmarz::bregman::ConvexFunction;
use bregman_kaczmarz::harness::{
    contraction_factors, exit_code_for_error, read_matrix, read_vector, run_experiment, theory_inputs,
    write_vector, ExperimentSpec, InstanceSource, MatrixSource, SolverSpec, TheoryInputs, DEFAULT_EPSILON,
    EXIT_MAX_ITERS, EXIT_OK, EXIT_USAGE,
};
use bregman_kaczmarz::linalg::{analyze, Side};
use bregman_kaczmarz::problems::build_instance;
use bregman_kaczmarz::solvers::{run, Relaxation, SolverConfig, SolverVariant, StopReason};
use bregman_kaczmarz::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "rabebk", version, about = "Block extended Bregman-Kaczmarz solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and report the final iterate.
    Solve(SolveArgs),
    /// Run a benchmark described by a key=value spec file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a grayscale image from Gaussian measurements.
    Image(ImageArgs),
    /// Print error-bound constants and contraction factors for a small matrix.
    Theory(TheoryArgs),
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Matrix file, or a generator such as gen:gaussian:200x100:seed=3.
    #[arg(long)]
    matrix: MatrixSource,
    /// Right-hand side file; required for file matrices.
    #[arg(long)]
    rhs: Option<PathBuf>,
    #[arg(long, default_value = "rrabebk")]
    variant: SolverVariant,
    #[arg(long, default_value_t = 20)]
    tau: usize,
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    /// Use per-side relaxation instead of one step for both updates.
    #[arg(long)]
    per_side: bool,
    #[arg(long, default_value_t = 5.0)]
    lambda: f64,
    /// Stopping tolerance, or `none` to run the whole budget.
    #[arg(long, default_value = "1e-5")]
    tol: String,
    #[arg(long, default_value_t = 5_000_000)]
    max_iters: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    checkpoint_every: u64,
    /// Write the convergence trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the final iterate, one value per line.
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ImageArgs {
    /// Plain PGM (P2) image; defaults to the bundled 28x28 digit.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    rows: usize,
    #[arg(long, default_value_t = 10_000)]
    iters: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "REBK,rRABEBK-1,rRABEBK-1.75,rRABEBK-2.25")]
    solvers: String,
    #[arg(long, default_value_t = 5.0)]
    lambda: f64,
    #[arg(long, default_value_t = 5.0)]
    q: f64,
    #[arg(long, default_value_t = 20)]
    tau: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
}

#[derive(clap::Args)]
struct TheoryArgs {
    /// Generator such as gen:gaussian:10x6:seed=1, or a matrix file with --x-hat.
    #[arg(long)]
    matrix: MatrixSource,
    #[arg(long)]
    x_hat: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    lambda: f64,
    #[arg(long, default_value_t = 20)]
    tau: usize,
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Error-bound constant of the primal problem, for matrices too wide
    /// for the exhaustive search.
    #[arg(long)]
    theta: Option<f64>,
    /// Error-bound constant of the auxiliary problem.
    #[arg(long)]
    theta_z: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_OK as u8 });
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench { config, out } => bench(config, out),
        Command::Image(args) => image(args),
        Command::Theory(args) => theory(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(EXIT_USAGE, exit_code_for_error);
            ExitCode::from(code as u8)
        }
    }
}

fn parse_tolerance(s: &str) -> anyhow::Result<Option<f64>> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    let v: f64 = s.parse().with_context(|| format!("bad tolerance '{s}'"))?;
    Ok(Some(v))
}

fn solve(args: SolveArgs) -> anyhow::Result<i32> {
    let (a, b, truth) = match (&args.matrix, &args.rhs) {
        (MatrixSource::File(path), Some(rhs)) => (read_matrix(path)?, read_vector(rhs)?, None),
        (MatrixSource::File(_), None) => bail!("--rhs is required with a matrix file"),
        (MatrixSource::Generated(params), rhs) => {
            let inst = build_instance(&params.clone().with_lambda(args.lambda))?;
            match rhs {
                Some(path) => (inst.a, read_vector(path)?, None),
                None => (inst.a, inst.b, Some(inst.x_hat)),
            }
        }
    };
    let relaxation = if args.per_side {
        Relaxation::PerSide { multiplier: args.multiplier }
    } else {
        Relaxation::Shared { multiplier: args.multiplier }
    };
    let cfg = SolverConfig {
        variant: args.variant,
        tau: args.tau,
        relaxation,
        f: ConvexFunction::l1_plus_half_squared(args.lambda)?,
        g: ConvexFunction::SquaredNorm,
        max_iters: args.max_iters,
        tolerance: parse_tolerance(&args.tol)?,
        seed: args.seed,
        checkpoint_every: args.checkpoint_every,
    };
    let pm = analyze(a, cfg.tau)?;
    let out = run(&pm, &b, &cfg, truth.as_deref())?;

    if let Some(path) = &args.trace {
        std::fs::write(path, out.trace.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.solution {
        write_vector(path, out.state.x())?;
    }
    let last = out.trace.last().copied();
    println!("variant      {}", cfg.variant);
    println!("alpha_z      {:.6}", out.relaxation.alpha_z);
    println!("alpha_x      {:.6}", out.relaxation.alpha_x);
    println!("iterations   {}", out.iterations());
    println!("stop         {:?}", out.stop);
    println!("time_s       {:.4}", out.elapsed_seconds);
    if let Some(err) = last.and_then(|r| r.relative_error) {
        println!("rel_error    {err:.6e}");
    }
    if let Some(res) = last.and_then(|r| r.dual_residual) {
        println!("dual_res     {res:.6e}");
    }
    Ok(match (out.stop, cfg.tolerance) {
        (StopReason::MaxIters, Some(_)) => EXIT_MAX_ITERS,
        _ => EXIT_OK,
    })
}

fn report(spec: &ExperimentSpec, out: &PathBuf) -> anyhow::Result<i32> {
    let results = run_experiment(spec, Some(out))?;
    print!("{}", results.summary_table());
    for r in results.runs.iter().filter(|r| r.note.is_some()) {
        eprintln!("{} trial {}: {}", r.solver, r.trial, r.note.as_deref().unwrap_or(""));
    }
    Ok(results.exit_code())
}

fn bench(config: PathBuf, out: PathBuf) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
    let spec = ExperimentSpec::parse(&text)?;
    report(&spec, &out)
}

fn image(args: ImageArgs) -> anyhow::Result<i32> {
    let solvers = args
        .solvers
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse::<SolverSpec>)
        .collect::<Result<Vec<_>, _>>()?;
    let source = InstanceSource::Image { path: args.input, rows: args.rows, q: args.q, lambda: args.lambda };
    let mut spec = ExperimentSpec::new(source, solvers);
    spec.tolerance = None;
    spec.max_iters = args.iters;
    spec.checkpoint_every = (args.iters / 100).max(1);
    spec.tau = args.tau;
    spec.seed = args.seed;
    spec.trials = args.trials;
    report(&spec, &args.out)
}

fn theory(args: TheoryArgs) -> anyhow::Result<i32> {
    let (a, x_hat) = match (&args.matrix, &args.x_hat) {
        (MatrixSource::Generated(p), None) => {
            let inst = build_instance(p)?;
            (inst.a, inst.x_hat)
        }
        (MatrixSource::Generated(p), Some(path)) => (build_instance(p)?.a, read_vector(path)?),
        (MatrixSource::File(path), Some(x)) => (read_matrix(path)?, read_vector(x)?),
        (MatrixSource::File(_), None) => bail!("--x-hat is required with a matrix file"),
    };
    let pm = analyze(a.clone(), args.tau)?;
    let mut inputs = match args.theta {
        Some(theta) => TheoryInputs {
            gamma_x: theta,
            theta_z: match args.theta_z {
                Some(t) => t,
                None => bregman_kaczmarz::harness::quadratic_dual_constant(&a)?,
            },
            mu_f: 1.0,
            mu_g: 1.0,
            l_g: 1.0,
            epsilon: args.epsilon,
            sigma_tilde_min: None,
            x_hat_min: None,
        },
        None => theory_inputs(&a, &x_hat, args.lambda)?,
    };
    inputs.epsilon = args.epsilon;
    if let Some(t) = args.theta_z {
        inputs.theta_z = t;
    }
    let beta = pm.beta_max(Side::Row).max(pm.beta_max(Side::Col));
    let alpha = args.multiplier / beta;
    let constants = contraction_factors(&pm, &inputs, alpha, alpha)?;
    print!("{}", constants.to_text());
    Ok(EXIT_OK)
}
