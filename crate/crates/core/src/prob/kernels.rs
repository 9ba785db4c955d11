//! Scalar kernels: log-sum-exp, approximate probabilistic logic and the
//! smoothed indicator.

use super::ProbError;

/// Stable `log Σ exp(v_i)`.
pub fn logsumexp(values: &[f64]) -> Result<f64, ProbError> {
    let max = values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        return Err(ProbError::Domain("logsumexp of an empty vector"));
    }
    if values.len() == 1 {
        return Ok(values[0]);
    }
    if max == f64::NEG_INFINITY || max == f64::INFINITY || max.is_nan() {
        return Ok(max);
    }
    let sum: f64 = values.iter().map(|v| libm::exp(v - max)).sum();
    Ok(max + libm::log(sum))
}

fn check_probability(p: f64) -> Result<f64, ProbError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(ProbError::Domain("probability outside [0, 1]"))
    }
}

/// Approximate disjunction of independent events: `a + b − a·b`.
pub fn prob_or(a: f64, b: f64) -> Result<f64, ProbError> {
    let a = check_probability(a)?;
    let b = check_probability(b)?;
    Ok((a + b - a * b).clamp(0.0, 1.0))
}

/// Approximate conjunction of independent events: the product.
pub fn prob_and(probabilities: &[f64]) -> Result<f64, ProbError> {
    probabilities
        .iter()
        .try_fold(1.0, |acc, &p| check_probability(p).map(|p| acc * p))
}

/// Logistic smoothing of the indicator `d > 0`, equal to 0.5 at `d = 0`.
pub fn smooth_indicator(distance: f64, steepness: f64) -> f64 {
    debug_assert!(steepness > 0.0);
    logistic(steepness * distance)
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// `log(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// Inverse of [`softplus`] for positive `y`.
pub fn softplus_inverse(y: f64) -> f64 {
    debug_assert!(y > 0.0);
    if y > 30.0 {
        y + libm::log(-libm::expm1(-y))
    } else {
        libm::log(libm::expm1(y))
    }
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}
