use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::{info, warn};

use crate::bregman::ConvexFunction;
use crate::error::{invalid, Error, Result};
use crate::linalg::analyze;
use crate::problems::{build_instance, load_image_instance, Graymap, InstanceParams, MatrixKind, ProblemInstance};
use crate::solvers::{run, Relaxation, SolverConfig, SolverVariant, StopReason};

use super::metrics::{median, psnr};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MAX_ITERS: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Process exit code for an error that aborted a command.
pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::NumericalFailure(_) | Error::DegenerateBlock { .. } | Error::InconsistentPair(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

/// A solver entry such as `REBK` or `rRABEBK-1.75`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub variant: SolverVariant,
    pub multiplier: f64,
    pub label: String,
}

impl FromStr for SolverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, mult) = match s.split_once('-') {
            Some((name, m)) => (name, Some(m)),
            None => (s, None),
        };
        let variant: SolverVariant = name.parse()?;
        let multiplier = match mult {
            None => 1.0,
            Some(m) => {
                if variant.has_unit_step() {
                    return Err(Error::Parse(format!("{} takes no relaxation multiplier", variant.label())));
                }
                let v: f64 = m.parse().map_err(|e| Error::Parse(format!("bad multiplier '{m}': {e}")))?;
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::Parse(format!("multiplier must be positive, got {m}")));
                }
                v
            }
        };
        let label = match mult {
            Some(m) => format!("{}-{m}", variant.label()),
            None => variant.label().to_string(),
        };
        Ok(Self { variant, multiplier, label })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    /// Synthetic instance; the seed is replaced per trial.
    Generated(InstanceParams),
    /// Image recovery with a Gaussian `rows x pixels` sensing matrix.
    /// `path = None` uses the bundled digit.
    Image { path: Option<PathBuf>, rows: usize, q: f64, lambda: f64 },
}

/// A benchmark description, usually read from a `key = value` file.
///
/// Keys (all optional except `solvers`):
///
/// ```text
/// kind             gaussian | bernoulli | structured | image   (gaussian)
/// m, n             matrix size; `rows` is an alias of m        (200, 100)
/// rank, kappa      structured generator parameters
/// image            PGM path for kind = image                   (bundled digit)
/// lambda           l1 weight of the objective                  (5)
/// q                noise level ‖e‖ / ‖A x̂‖                     (5)
/// nnz              nonzeros of x̂                               (ceil(n/100))
/// seed             master seed; trial t uses seed XOR t        (0)
/// trials           number of trials                            (1)
/// tau              block size                                  (20)
/// tol              relative-error tolerance, or `none`         (1e-5)
/// max_iters        iteration budget; `iters` is an alias       (5000000)
/// checkpoint_every trace and stopping-check cadence            (100)
/// relaxation       shared | per-side                           (shared)
/// solvers          comma-separated, e.g. REBK, rRABEBK-1.75
/// traces           write per-run trace files: true | false     (true)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub source: InstanceSource,
    pub solvers: Vec<SolverSpec>,
    pub trials: usize,
    pub seed: u64,
    pub tau: usize,
    pub tolerance: Option<f64>,
    pub max_iters: u64,
    pub checkpoint_every: u64,
    pub per_side_relaxation: bool,
    pub write_traces: bool,
}

impl ExperimentSpec {
    pub fn new(source: InstanceSource, solvers: Vec<SolverSpec>) -> Self {
        Self {
            source,
            solvers,
            trials: 1,
            seed: 0,
            tau: 20,
            tolerance: Some(1e-5),
            max_iters: 5_000_000,
            checkpoint_every: 100,
            per_side_relaxation: false,
            write_traces: true,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = "gaussian".to_string();
        let (mut m, mut n) = (200usize, 100usize);
        let (mut rank, mut kappa) = (None, None);
        let (mut lambda, mut q) = (5.0, 5.0);
        let mut nnz = None;
        let mut image = None;
        let mut solvers = None;
        let mut spec = Self::new(InstanceSource::Generated(InstanceParams::gaussian(1, 1)), Vec::new());

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| Error::Parse(format!("line {}: bad {key}: {e}", lineno + 1));
            let int = |v: &str| v.parse::<u64>().map_err(|e| bad(&e));
            let num = |v: &str| v.parse::<f64>().map_err(|e| bad(&e));
            match key {
                "kind" => kind = value.to_ascii_lowercase(),
                "m" | "rows" => m = int(value)? as usize,
                "n" => n = int(value)? as usize,
                "rank" => rank = Some(int(value)? as usize),
                "kappa" => kappa = Some(num(value)?),
                "image" => image = (value != "bundled").then(|| PathBuf::from(value)),
                "lambda" => lambda = num(value)?,
                "q" => q = num(value)?,
                "nnz" => nnz = Some(int(value)? as usize),
                "seed" => spec.seed = int(value)?,
                "trials" => spec.trials = int(value)? as usize,
                "tau" => spec.tau = int(value)? as usize,
                "tol" => spec.tolerance = if value == "none" { None } else { Some(num(value)?) },
                "max_iters" | "iters" => spec.max_iters = int(value)?,
                "checkpoint_every" => spec.checkpoint_every = int(value)?,
                "relaxation" => {
                    spec.per_side_relaxation = match value {
                        "shared" => false,
                        "per-side" => true,
                        other => return Err(bad(&format!("unknown mode '{other}'"))),
                    }
                }
                "traces" => spec.write_traces = value.parse::<bool>().map_err(|e| bad(&e))?,
                "solvers" => {
                    solvers = Some(
                        value
                            .split(',')
                            .filter(|s| !s.trim().is_empty())
                            .map(SolverSpec::from_str)
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                other => return Err(Error::Parse(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }

        spec.solvers = solvers.ok_or_else(|| Error::Parse("missing 'solvers'".into()))?;
        let params = |kind: MatrixKind| {
            let mut p = InstanceParams::new(kind, m, n).with_lambda(lambda).with_q(q);
            p.nnz = nnz;
            p
        };
        spec.source = match kind.as_str() {
            "gaussian" => InstanceSource::Generated(params(MatrixKind::Gaussian)),
            "bernoulli" => InstanceSource::Generated(params(MatrixKind::Bernoulli)),
            "structured" => InstanceSource::Generated(params(MatrixKind::Structured {
                rank: rank.unwrap_or(m.min(n)),
                kappa: kappa.ok_or_else(|| Error::Parse("structured kind needs kappa".into()))?,
            })),
            "image" => InstanceSource::Image { path: image, rows: m, q, lambda },
            other => return Err(Error::Parse(format!("unknown kind '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(invalid("at least one solver is required"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.tau == 0 || self.checkpoint_every == 0 {
            return Err(invalid("tau and checkpoint_every must be positive"));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(invalid(format!("tolerance must be positive, got {t}")));
            }
        }
        let mut labels: Vec<&str> = self.solvers.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("solver labels must be distinct"));
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed ^ trial as u64
    }

    fn lambda(&self) -> f64 {
        match &self.source {
            InstanceSource::Generated(p) => p.lambda,
            InstanceSource::Image { lambda, .. } => *lambda,
        }
    }

    fn is_image(&self) -> bool {
        matches!(self.source, InstanceSource::Image { .. })
    }

    fn solver_config(&self, s: &SolverSpec, seed: u64) -> Result<SolverConfig> {
        let relaxation = if self.per_side_relaxation {
            Relaxation::PerSide { multiplier: s.multiplier }
        } else {
            Relaxation::Shared { multiplier: s.multiplier }
        };
        Ok(SolverConfig {
            variant: s.variant,
            tau: self.tau,
            relaxation,
            f: ConvexFunction::l1_plus_half_squared(self.lambda())?,
            g: ConvexFunction::SquaredNorm,
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            seed,
            checkpoint_every: self.checkpoint_every,
        })
    }
}

/// One solver run on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub solver: String,
    pub trial: usize,
    pub seed: u64,
    pub iterations: u64,
    pub stop: StopReason,
    pub final_error: Option<f64>,
    pub psnr: Option<f64>,
    pub elapsed_seconds: f64,
    pub setup_seconds: f64,
    /// Set when the run failed; such runs count as not converged.
    pub note: Option<String>,
    pub solution: Vec<f64>,
}

/// Per-solver aggregates over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSummary {
    pub solver: String,
    pub trials: usize,
    pub converged: usize,
    pub failed: usize,
    pub median_iterations: f64,
    pub median_error: Option<f64>,
    pub median_psnr: Option<f64>,
    pub median_seconds: f64,
    pub median_setup_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    pub spec: ExperimentSpec,
    /// Sorted by solver order in `ExperimentSpec::solvers`, then trial.
    pub runs: Vec<RunRecord>,
    pub summary: Vec<ConfigSummary>,
    /// `(trial, ground truth)` for each trial whose instance was built.
    pub ground_truths: Vec<(usize, Vec<f64>)>,
}

impl ExperimentResults {
    pub fn summary_for(&self, label: &str) -> Option<&ConfigSummary> {
        self.summary.iter().find(|s| s.solver == label)
    }

    pub fn exit_code(&self) -> i32 {
        if self.runs.iter().any(|r| r.note.is_some()) {
            EXIT_NUMERICAL
        } else if self.spec.tolerance.is_some() && self.runs.iter().any(|r| r.stop == StopReason::MaxIters) {
            EXIT_MAX_ITERS
        } else {
            EXIT_OK
        }
    }

    /// Summary as CSV. Timing columns come last and can be left out for
    /// byte-level comparisons.
    pub fn summary_csv(&self, with_times: bool) -> String {
        let mut out = String::from("solver,trials,converged,failed,median_it,median_err,median_psnr");
        out.push_str(if with_times { ",median_time_s,median_setup_s\n" } else { "\n" });
        for s in &self.summary {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{}",
                s.solver,
                s.trials,
                s.converged,
                s.failed,
                s.median_iterations,
                opt_sci(s.median_error),
                opt_fixed(s.median_psnr)
            );
            if with_times {
                let _ = write!(out, ",{:.6},{:.6}", s.median_seconds, s.median_setup_seconds);
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_table(&self) -> String {
        let header = ["solver", "trials", "conv", "failed", "median IT", "median ERR", "PSNR (dB)", "time (s)", "setup (s)"];
        let rows: Vec<[String; 9]> = self
            .summary
            .iter()
            .map(|s| {
                [
                    s.solver.clone(),
                    s.trials.to_string(),
                    s.converged.to_string(),
                    s.failed.to_string(),
                    format!("{}", s.median_iterations),
                    opt_sci(s.median_error),
                    opt_fixed(s.median_psnr),
                    format!("{:.4}", s.median_seconds),
                    format!("{:.4}", s.median_setup_seconds),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[&str]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(k, (c, w))| if k == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&header);
        for r in &rows {
            line(&r.iter().map(String::as_str).collect::<Vec<_>>());
        }
        out
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from("solver,trial,seed,iterations,stop,err,psnr,note,time_s,setup_s\n");
        for r in &self.runs {
            let note = r.note.as_deref().unwrap_or("").replace([',', '\n'], ";");
            let stop = match r.stop {
                StopReason::Converged => "converged",
                StopReason::MaxIters => "max_iters",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{stop},{},{},{note},{:.6},{:.6}",
                r.solver,
                r.trial,
                r.seed,
                r.iterations,
                opt_sci(r.final_error),
                opt_fixed(r.psnr),
                r.elapsed_seconds,
                r.setup_seconds
            );
        }
        out
    }
}

fn opt_sci(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| format!("{x:.6e}"))
}

fn opt_fixed(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| format!("{x:.4}"))
}

struct TrialData {
    instance: ProblemInstance,
    image: Option<(usize, usize, u16)>,
}

fn build_trial(spec: &ExperimentSpec, seed: u64, image: Option<&Graymap>) -> Result<TrialData> {
    match &spec.source {
        InstanceSource::Generated(p) => {
            let params = p.clone().with_seed(seed);
            Ok(TrialData { instance: build_instance(&params)?, image: None })
        }
        InstanceSource::Image { rows, q, lambda, .. } => {
            let img = image.expect("image loaded before trials");
            Ok(TrialData {
                instance: load_image_instance(img, *rows, *q, *lambda, seed)?,
                image: Some((img.width(), img.height(), img.maxval())),
            })
        }
    }
}

/// Runs every solver on every trial and, when `out_dir` is given, writes
/// `summary.csv`, `summary.txt`, `runs.csv`, per-run traces under `traces/`
/// and, for image experiments, reconstructed PGM files.
///
/// A failing run is recorded with a note and does not stop the others.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: Option<&Path>) -> Result<ExperimentResults> {
    spec.validate()?;
    let image = match &spec.source {
        InstanceSource::Image { path: Some(p), .. } => Some(Graymap::read(p)?),
        InstanceSource::Image { path: None, .. } => Some(Graymap::bundled()),
        InstanceSource::Generated(_) => None,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        if spec.write_traces {
            std::fs::create_dir_all(dir.join("traces"))?;
        }
        if let Some(img) = &image {
            img.write(&dir.join("original.pgm"))?;
        }
    }

    let mut runs = Vec::with_capacity(spec.trials * spec.solvers.len());
    let mut ground_truths = Vec::new();
    for trial in 0..spec.trials {
        let seed = spec.trial_seed(trial);
        let prepared = build_trial(spec, seed, image.as_ref()).and_then(|t| {
            let start = Instant::now();
            let pm = analyze(t.instance.a.clone(), spec.tau)?;
            Ok((t, pm, start.elapsed().as_secs_f64()))
        });
        let (trial_data, pm, setup) = match prepared {
            Ok(v) => v,
            Err(e) => {
                warn!("trial {trial}: instance setup failed: {e}");
                for s in &spec.solvers {
                    runs.push(failed_run(s, trial, seed, 0.0, &e));
                }
                continue;
            }
        };
        let inst = &trial_data.instance;
        ground_truths.push((trial, inst.x_hat.clone()));

        for s in &spec.solvers {
            let outcome = spec.solver_config(s, seed).and_then(|cfg| run(&pm, &inst.b, &cfg, Some(&inst.x_hat)));
            let record = match outcome {
                Ok(out) => {
                    if let (Some(dir), true) = (out_dir, spec.write_traces) {
                        std::fs::write(dir.join("traces").join(format!("{}_trial{trial}.csv", s.label)), out.trace.to_csv())?;
                    }
                    let solution = out.state.x().to_vec();
                    if let (Some(dir), Some((w, h, maxval))) = (out_dir, trial_data.image) {
                        Graymap::from_unit_values(w, h, maxval, &solution)?
                            .write(&dir.join(format!("recon_{}_trial{trial}.pgm", s.label)))?;
                    }
                    RunRecord {
                        solver: s.label.clone(),
                        trial,
                        seed,
                        iterations: out.iterations(),
                        stop: out.stop,
                        final_error: out.final_relative_error(),
                        psnr: Some(psnr(&inst.x_hat, &solution)?),
                        elapsed_seconds: out.elapsed_seconds,
                        setup_seconds: setup,
                        note: None,
                        solution,
                    }
                }
                Err(e) => {
                    warn!("{} trial {trial}: {e}", s.label);
                    failed_run(s, trial, seed, setup, &e)
                }
            };
            info!(
                "{} trial {trial}: {} iterations, err {}",
                record.solver,
                record.iterations,
                opt_sci(record.final_error)
            );
            runs.push(record);
        }
    }
    let order = |label: &str| spec.solvers.iter().position(|s| s.label == label).unwrap_or(usize::MAX);
    runs.sort_by(|a, b| order(&a.solver).cmp(&order(&b.solver)).then(a.trial.cmp(&b.trial)));

    let summary = spec
        .solvers
        .iter()
        .map(|s| {
            let mine: Vec<&RunRecord> = runs.iter().filter(|r| r.solver == s.label).collect();
            let ok: Vec<&RunRecord> = mine.iter().copied().filter(|r| r.note.is_none()).collect();
            let collect = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> Vec<f64> { ok.iter().filter_map(|r| f(r)).collect() };
            ConfigSummary {
                solver: s.label.clone(),
                trials: mine.len(),
                converged: ok.iter().filter(|r| r.stop == StopReason::Converged).count(),
                failed: mine.len() - ok.len(),
                median_iterations: median(&collect(&|r| Some(r.iterations as f64))).unwrap_or(f64::NAN),
                median_error: median(&collect(&|r| r.final_error)),
                median_psnr: if spec.is_image() || ok.iter().all(|r| r.psnr.is_some()) {
                    median(&collect(&|r| r.psnr))
                } else {
                    None
                },
                median_seconds: median(&collect(&|r| Some(r.elapsed_seconds))).unwrap_or(f64::NAN),
                median_setup_seconds: median(&collect(&|r| Some(r.setup_seconds))).unwrap_or(f64::NAN),
            }
        })
        .collect();

    let results = ExperimentResults { spec: spec.clone(), runs, summary, ground_truths };
    if let Some(dir) = out_dir {
        std::fs::write(dir.join("summary.csv"), results.summary_csv(true))?;
        std::fs::write(dir.join("summary.txt"), results.summary_table())?;
        std::fs::write(dir.join("runs.csv"), results.runs_csv())?;
    }
    Ok(results)
}

fn failed_run(s: &SolverSpec, trial: usize, seed: u64, setup: f64, e: &Error) -> RunRecord {
    RunRecord {
        solver: s.label.clone(),
        trial,
        seed,
        iterations: 0,
        stop: StopReason::MaxIters,
        final_error: None,
        psnr: None,
        elapsed_seconds: 0.0,
        setup_seconds: setup,
        note: Some(e.to_string()),
        solution: Vec::new(),
    }
}
