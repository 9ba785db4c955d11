use alloc::vec::Vec;

use super::{DecisionConfig, IdiomError, PastStateBuffer, ProgressSign};
use crate::prob::{relu, Distribution};

/// One-point divergence estimate between the predicted state distribution
/// and a past marginal, clipped at zero.
pub fn progress_score(past: &Distribution, pred: &Distribution, z: &[f64], sign: ProgressSign) -> Result<f64, IdiomError> {
    let lp_pred = pred.log_prob(z)?;
    if lp_pred == f64::NEG_INFINITY {
        return Err(IdiomError::Prob(crate::prob::ProbError::Domain("state outside predicted support")));
    }
    let lp_past = past.log_prob(z)?;
    let diff = match sign {
        ProgressSign::PredMinusPast => lp_pred - lp_past,
        ProgressSign::PastMinusPred => lp_past - lp_pred,
    };
    if diff.is_nan() {
        return Ok(0.0);
    }
    Ok(relu(diff))
}

/// Weights for `count` past states, index 0 being the newest. The oldest
/// state gets weight 1 and the newest `lambda_min`.
pub fn decay_weights(count: usize, lambda_min: f64) -> Vec<f64> {
    if count <= 1 {
        return alloc::vec![1.0; count];
    }
    let span = (count - 1) as f64;
    (0..count)
        .map(|l| 1.0 - (1.0 - lambda_min) * (count - 1 - l) as f64 / span)
        .collect()
}

/// Combines per-state progress scores: `Π λ_l (1 − e^{−σ_p P_l})`.
pub fn combine_progress(scores: &[f64], lambda_min: f64, sigma_p: f64) -> f64 {
    let weights = decay_weights(scores.len(), lambda_min);
    scores
        .iter()
        .zip(&weights)
        .map(|(p, w)| w * (1.0 - libm::exp(-sigma_p * p)))
        .product::<f64>()
        .clamp(0.0, 1.0)
}

/// Progress pseudo-probability against the `L` past states of the buffer.
/// Fails when the buffer holds fewer than `L` entries.
pub fn progress_probability(
    buffer: &PastStateBuffer,
    pred: &Distribution,
    z: &[f64],
    cfg: &DecisionConfig,
) -> Result<f64, IdiomError> {
    if buffer.len() < cfg.past_states {
        return Err(IdiomError::InsufficientHistory { needed: cfg.past_states, available: buffer.len() });
    }
    progress_probability_clamped(buffer, pred, z, cfg)
}

/// As [`progress_probability`], but `L` shrinks to the buffer length when
/// the history is short.
pub fn progress_probability_clamped(
    buffer: &PastStateBuffer,
    pred: &Distribution,
    z: &[f64],
    cfg: &DecisionConfig,
) -> Result<f64, IdiomError> {
    let window = buffer.window(cfg.past_states);
    if window.is_empty() {
        return Err(IdiomError::InsufficientHistory { needed: 1, available: 0 });
    }
    let mut scores = Vec::with_capacity(window.len());
    for past in window {
        scores.push(progress_score(past, pred, z, cfg.progress_sign)?);
    }
    Ok(combine_progress(&scores, cfg.lambda_p_min, cfg.sigma_p))
}
