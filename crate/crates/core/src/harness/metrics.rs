use crate::error::{invalid, Result};

/// `10 log10(Σ s_i² / Σ (s_i - e_i)²)`: power of `signal` over the power of
/// the error of `estimate`.
///
/// Returns `+inf` when the vectors are equal.
pub fn psnr(signal: &[f64], estimate: &[f64]) -> Result<f64> {
    if signal.len() != estimate.len() {
        return Err(invalid(format!("psnr of vectors with lengths {} and {}", signal.len(), estimate.len())));
    }
    let power: f64 = signal.iter().map(|v| v * v).sum();
    let error: f64 = signal.iter().zip(estimate).map(|(a, b)| (a - b) * (a - b)).sum();
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (power / error).log10())
}

/// Median of the finite-or-infinite values; NaN-free input expected.
/// Averages the two middle values for even counts. `None` when empty.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}
