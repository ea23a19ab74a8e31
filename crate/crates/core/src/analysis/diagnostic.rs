//! Partial sums `sum_{q=0}^n (-1)^q cos[q (mu + Delta_0) tau]` that a
//! discrete-mode oscillation at frequency `mu` would need to settle at 1/2.

use crate::error::{Error, Result};
use crate::params::FeedbackParams;

/// Partial sums for `n = 0..=n_max`.
pub fn dm_rabi_diagnostic(params: &FeedbackParams, mu: f64, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::InvalidParameter { name: "n_max", value: n_max as f64, reason: "must be at least 1" });
    }
    crate::error::check_finite("mu", mu)?;
    let theta = (mu + params.delta0()) * params.tau();
    let mut sum = 0.0;
    Ok((0..=n_max)
        .map(|q| {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (q as f64 * theta).cos();
            sum
        })
        .collect())
}

/// Population variance of the trailing `tail` entries.
pub fn tail_variance(sums: &[f64], tail: usize) -> f64 {
    let tail = &sums[sums.len().saturating_sub(tail)..];
    if tail.is_empty() {
        return 0.0;
    }
    let n = tail.len() as f64;
    let mean = tail.iter().sum::<f64>() / n;
    tail.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}
