use crate::error::{invalid, Error, Result};
use crate::linalg::{singular_values, DenseMatrix, PartitionedMatrix, Side};

/// Largest column count for the exhaustive subset search in
/// [`sigma_tilde_min`].
pub const SIGMA_TILDE_MAX_COLS: usize = 14;

/// Free parameter of the primal rate constants.
pub const DEFAULT_EPSILON: f64 = 1e3;

const NONZERO_REL_TOL: f64 = 1e-10;

/// Smallest nonzero singular value over all nonzero column submatrices.
pub fn sigma_tilde_min(a: &DenseMatrix) -> Result<f64> {
    let n = a.cols();
    if n > SIGMA_TILDE_MAX_COLS {
        return Err(Error::Capability(format!(
            "exhaustive search over column subsets is limited to n <= {SIGMA_TILDE_MAX_COLS} (got n = {n}); \
             supply the error-bound constant directly instead"
        )));
    }
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        if let Some(s) = smallest_nonzero_singular_value(&a.select_cols(&cols)?) {
            best = best.min(s);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(invalid("matrix is zero"))
    }
}

fn smallest_nonzero_singular_value(a: &DenseMatrix) -> Option<f64> {
    let s = singular_values(a);
    let top = *s.first()?;
    if top == 0.0 {
        return None;
    }
    let cutoff = NONZERO_REL_TOL * top * a.rows().max(a.cols()) as f64;
    s.into_iter().filter(|&v| v > cutoff).last()
}

/// `1/θ(x̂) = (|x̂|_min + 2λ) / (σ̃²_min(A) |x̂|_min)`, the inverse of the
/// error-bound constant for `f = λ‖·‖₁ + ½‖·‖²`.
pub fn theta_hat(a: &DenseMatrix, x_hat: &[f64], lambda: f64) -> Result<f64> {
    if x_hat.len() != a.cols() {
        return Err(invalid(format!("x_hat has length {}, matrix has {} columns", x_hat.len(), a.cols())));
    }
    if !(lambda >= 0.0) {
        return Err(invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    let x_min = support_min(x_hat)?;
    let s = sigma_tilde_min(a)?;
    Ok((x_min + 2.0 * lambda) / (s * s * x_min))
}

fn support_min(x: &[f64]) -> Result<f64> {
    x.iter()
        .map(|v| v.abs())
        .filter(|&v| v > 0.0)
        .min_by(f64::total_cmp)
        .ok_or_else(|| invalid("x_hat is zero"))
}

/// Error-bound constant of the auxiliary sequence for quadratic `g`:
/// the squared smallest nonzero singular value of `A`.
pub fn quadratic_dual_constant(a: &DenseMatrix) -> Result<f64> {
    smallest_nonzero_singular_value(a).map(|s| s * s).ok_or_else(|| invalid("matrix is zero"))
}

/// Inputs to [`contraction_factors`]: error-bound constants and moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryInputs {
    /// `γ(x̂) = θ(x̂)`.
    pub gamma_x: f64,
    /// `θ(ẑ)`.
    pub theta_z: f64,
    pub mu_f: f64,
    pub mu_g: f64,
    pub l_g: f64,
    pub epsilon: f64,
    pub sigma_tilde_min: Option<f64>,
    pub x_hat_min: Option<f64>,
}

/// Computes every input exactly for `f = λ‖·‖₁ + ½‖·‖²` and quadratic `g`.
/// Limited to `n <= SIGMA_TILDE_MAX_COLS`.
pub fn theory_inputs(a: &DenseMatrix, x_hat: &[f64], lambda: f64) -> Result<TheoryInputs> {
    let inv_theta = theta_hat(a, x_hat, lambda)?;
    Ok(TheoryInputs {
        gamma_x: 1.0 / inv_theta,
        theta_z: quadratic_dual_constant(a)?,
        mu_f: 1.0,
        mu_g: 1.0,
        l_g: 1.0,
        epsilon: DEFAULT_EPSILON,
        sigma_tilde_min: Some(sigma_tilde_min(a)?),
        x_hat_min: Some(support_min(x_hat)?),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryConstants {
    pub theta_hat: f64,
    pub theta_z: f64,
    pub sigma_tilde_min: Option<f64>,
    pub x_hat_min: Option<f64>,
    pub beta_i_max: f64,
    pub beta_j_max: f64,
    pub alpha_z: f64,
    pub alpha_x: f64,
    pub c1: f64,
    pub c2: f64,
    pub epsilon: f64,
    pub mu_f: f64,
    pub mu_g: f64,
    pub l_g: f64,
    pub contraction_z: f64,
    pub contraction_x: f64,
    /// `1 - μ_f γ / (2 β^I_max ‖A‖_F²)`, the primal factor at `α_x = μ_f/β^I_max`.
    pub optimal_contraction_x: f64,
    /// Relaxation parameters outside their admissible windows, or factors
    /// outside `(0, 1)`.
    pub warnings: Vec<String>,
}

impl TheoryConstants {
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6e}"));
        let mut out = String::new();
        let rows: [(&str, String); 17] = [
            ("theta_hat", format!("{:.6e}", self.theta_hat)),
            ("inv_theta_hat", format!("{:.6e}", 1.0 / self.theta_hat)),
            ("theta_z", format!("{:.6e}", self.theta_z)),
            ("sigma_tilde_min", opt(self.sigma_tilde_min)),
            ("x_hat_min", opt(self.x_hat_min)),
            ("beta_I_max", format!("{:.6}", self.beta_i_max)),
            ("beta_J_max", format!("{:.6}", self.beta_j_max)),
            ("alpha_z", format!("{:.6}", self.alpha_z)),
            ("alpha_x", format!("{:.6}", self.alpha_x)),
            ("epsilon", format!("{:.3e}", self.epsilon)),
            ("mu_f", format!("{}", self.mu_f)),
            ("mu_g", format!("{}", self.mu_g)),
            ("c1", format!("{:.6e}", self.c1)),
            ("c2", format!("{:.6e}", self.c2)),
            ("contraction_z", format!("{:.12}", self.contraction_z)),
            ("contraction_x", format!("{:.12}", self.contraction_x)),
            ("optimal_contraction_x", format!("{:.12}", self.optimal_contraction_x)),
        ];
        for (k, v) in rows {
            let _ = std::fmt::Write::write_fmt(&mut out, format_args!("{k:<22} {v}\n"));
        }
        for w in &self.warnings {
            out.push_str("warning: ");
            out.push_str(w);
            out.push('\n');
        }
        out
    }
}

/// Rate constants for the auxiliary and primary sequences at the given
/// relaxation parameters.
pub fn contraction_factors(
    pm: &PartitionedMatrix,
    inputs: &TheoryInputs,
    alpha_z: f64,
    alpha_x: f64,
) -> Result<TheoryConstants> {
    let TheoryInputs { gamma_x, theta_z, mu_f, mu_g, l_g, epsilon, .. } = *inputs;
    for (name, v) in [("gamma", gamma_x), ("theta_z", theta_z), ("mu_f", mu_f), ("mu_g", mu_g), ("L_g", l_g), ("epsilon", epsilon)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("{name} must be positive and finite, got {v}")));
        }
    }
    let fro2 = pm.total_fro2();
    let bi = pm.beta_max(Side::Row);
    let bj = pm.beta_max(Side::Col);

    let contraction_z = 1.0 - alpha_z * (2.0 * mu_g - bj * alpha_z) * theta_z / (2.0 * mu_g * fro2);
    let slack = mu_f - bi * alpha_x;
    let c1 = (alpha_x * (2.0 * mu_f - bi * alpha_x) - alpha_x * slack / epsilon) / (2.0 * mu_f * fro2);
    let c2 = (alpha_x * alpha_x * bi + epsilon * alpha_x * slack) / (2.0 * mu_f * fro2);
    let optimal_contraction_x = 1.0 - mu_f * gamma_x / (2.0 * bi * fro2);
    let at_optimum = (alpha_x - mu_f / bi).abs() <= 1e-12 * (mu_f / bi);
    let contraction_x = if at_optimum { optimal_contraction_x } else { 1.0 - c1 * gamma_x };

    let mut warnings = Vec::new();
    if !(alpha_z > 0.0 && alpha_z < 2.0 * mu_g / bj) {
        warnings.push(format!("alpha_z = {alpha_z} outside (0, 2 mu_g / beta_J_max = {})", 2.0 * mu_g / bj));
    }
    if !(alpha_x > 0.0 && (alpha_x <= mu_f / bi || at_optimum)) {
        warnings.push(format!("alpha_x = {alpha_x} outside (0, mu_f / beta_I_max = {}]", mu_f / bi));
    }
    for (name, v) in [("contraction_z", contraction_z), ("contraction_x", contraction_x)] {
        if !(v > 0.0 && v < 1.0) {
            warnings.push(format!("{name} = {v} is not in (0, 1)"));
        }
    }

    Ok(TheoryConstants {
        theta_hat: gamma_x,
        theta_z,
        sigma_tilde_min: inputs.sigma_tilde_min,
        x_hat_min: inputs.x_hat_min,
        beta_i_max: bi,
        beta_j_max: bj,
        alpha_z,
        alpha_x,
        c1,
        c2,
        epsilon,
        mu_f,
        mu_g,
        l_g,
        contraction_z,
        contraction_x,
        optimal_contraction_x,
        warnings,
    })
}
