//! Experiment orchestration, file formats, reporting metrics and the
//! small-instance theory oracle.

mod experiment;
mod io;
mod metrics;
mod theory;

pub use experiment::{
    exit_code_for_error, run_experiment, ConfigSummary, ExperimentResults, ExperimentSpec, InstanceSource,
    RunRecord, SolverSpec, EXIT_MAX_ITERS, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE,
};
pub use io::{
    format_matrix, format_vector, parse_matrix, parse_vector, read_matrix, read_vector, write_matrix, write_vector,
    MatrixSource,
};
pub use metrics::{median, psnr};
pub use theory::{
    contraction_factors, quadratic_dual_constant, sigma_tilde_min, theory_inputs, theta_hat, TheoryConstants,
    TheoryInputs, DEFAULT_EPSILON, SIGMA_TILDE_MAX_COLS,
};
