use alloc::vec;
use alloc::vec::Vec;

use super::special::{digamma, ln_beta};
use super::{ProbError, RandomStream};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Smallest distance from {0, 1} a Beta draw may land on; draws that
/// underflow are pulled back inside the open support.
const BETA_EDGE: f64 = 1e-12;

/// The four distribution families used by the planner.
///
/// `Beta`, `NormalDiag` and `Uniform` are products of independent
/// one-dimensional factors, one per coordinate. `Bernoulli` is scalar with
/// values in {0, 1}.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Distribution {
    Bernoulli { p: f64 },
    Beta { alpha: Vec<f64>, beta: Vec<f64> },
    NormalDiag { mean: Vec<f64>, std: Vec<f64> },
    Uniform { lo: Vec<f64>, hi: Vec<f64> },
}

impl Distribution {
    pub fn bernoulli(p: f64) -> Result<Self, ProbError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ProbError::ParameterDomain("Bernoulli p must lie in [0, 1]"));
        }
        Ok(Self::Bernoulli { p })
    }

    pub fn beta(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self, ProbError> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(ProbError::ParameterDomain("Beta needs matching nonempty alpha/beta"));
        }
        if alpha.iter().chain(&beta).any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(ProbError::ParameterDomain("Beta alpha and beta must be positive"));
        }
        Ok(Self::Beta { alpha, beta })
    }

    pub fn beta1(alpha: f64, beta: f64) -> Result<Self, ProbError> {
        Self::beta(vec![alpha], vec![beta])
    }

    pub fn normal_diag(mean: Vec<f64>, std: Vec<f64>) -> Result<Self, ProbError> {
        if mean.is_empty() || mean.len() != std.len() {
            return Err(ProbError::ParameterDomain("NormalDiag needs matching nonempty mean/std"));
        }
        if std.iter().any(|&s| !(s > 0.0 && s.is_finite())) || mean.iter().any(|m| !m.is_finite()) {
            return Err(ProbError::ParameterDomain("NormalDiag std must be positive and finite"));
        }
        Ok(Self::NormalDiag { mean, std })
    }

    pub fn uniform(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, ProbError> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(ProbError::ParameterDomain("Uniform needs matching nonempty bounds"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h && l.is_finite() && h.is_finite())) {
            return Err(ProbError::ParameterDomain("Uniform needs lo < hi"));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "Bernoulli",
            Self::Beta { .. } => "Beta",
            Self::NormalDiag { .. } => "NormalDiag",
            Self::Uniform { .. } => "Uniform",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Bernoulli { .. } => 1,
            Self::Beta { alpha, .. } => alpha.len(),
            Self::NormalDiag { mean, .. } => mean.len(),
            Self::Uniform { lo, .. } => lo.len(),
        }
    }

    /// Number of entries in the flattened parameter vector used by
    /// [`Self::grad_log_prob_params`].
    pub fn param_count(&self) -> usize {
        match self {
            Self::Bernoulli { .. } => 1,
            other => 2 * other.dim(),
        }
    }

    /// Re-checks the family invariants (useful after deserialization).
    pub fn validate(&self) -> Result<(), ProbError> {
        match self {
            Self::Bernoulli { p } => Self::bernoulli(*p).map(|_| ()),
            Self::Beta { alpha, beta } => Self::beta(alpha.clone(), beta.clone()).map(|_| ()),
            Self::NormalDiag { mean, std } => Self::normal_diag(mean.clone(), std.clone()).map(|_| ()),
            Self::Uniform { lo, hi } => Self::uniform(lo.clone(), hi.clone()).map(|_| ()),
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            Self::Bernoulli { p } => vec![*p],
            Self::Beta { alpha, beta } => alpha.iter().zip(beta).map(|(a, b)| a / (a + b)).collect(),
            Self::NormalDiag { mean, .. } => mean.clone(),
            Self::Uniform { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
        }
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Vec<f64> {
        match self {
            Self::Bernoulli { p } => vec![if rng.uniform() < *p { 1.0 } else { 0.0 }],
            Self::Beta { alpha, beta } => alpha
                .iter()
                .zip(beta)
                .map(|(&a, &b)| {
                    let x = rng.gamma(a);
                    let y = rng.gamma(b);
                    let v = x / (x + y);
                    if v.is_nan() {
                        // both gammas underflowed
                        a / (a + b)
                    } else {
                        v.clamp(BETA_EDGE, 1.0 - BETA_EDGE)
                    }
                })
                .collect(),
            Self::NormalDiag { mean, std } => mean
                .iter()
                .zip(std)
                .map(|(m, s)| m + s * rng.standard_normal())
                .collect(),
            Self::Uniform { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| (l + (h - l) * rng.uniform()).min(*h))
                .collect(),
        }
    }

    fn check_shape(&self, x: &[f64]) -> Result<(), ProbError> {
        if x.len() != self.dim() {
            return Err(ProbError::Shape { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// Log density (log mass for Bernoulli); `-inf` outside the support.
    pub fn log_prob(&self, x: &[f64]) -> Result<f64, ProbError> {
        self.check_shape(x)?;
        Ok(match self {
            Self::Bernoulli { p } => match x[0] {
                v if v == 1.0 => libm::log(*p),
                v if v == 0.0 => libm::log1p(-*p),
                _ => f64::NEG_INFINITY,
            },
            Self::Beta { alpha, beta } => {
                let mut total = 0.0;
                for ((&a, &b), &v) in alpha.iter().zip(beta).zip(x) {
                    if !(0.0..=1.0).contains(&v) {
                        return Ok(f64::NEG_INFINITY);
                    }
                    // (a − 1)·ln v with the 0·ln 0 = 0 convention at the edges
                    let left = if a == 1.0 { 0.0 } else { (a - 1.0) * libm::log(v) };
                    let right = if b == 1.0 { 0.0 } else { (b - 1.0) * libm::log1p(-v) };
                    total += left + right - ln_beta(a, b);
                }
                total
            }
            Self::NormalDiag { mean, std } => mean
                .iter()
                .zip(std)
                .zip(x)
                .map(|((m, s), v)| {
                    let z = (v - m) / s;
                    -0.5 * z * z - libm::log(*s) - LN_SQRT_2PI
                })
                .sum(),
            Self::Uniform { lo, hi } => {
                let mut total = 0.0;
                for ((l, h), v) in lo.iter().zip(hi).zip(x) {
                    if !(l <= v && v <= h) {
                        return Ok(f64::NEG_INFINITY);
                    }
                    total -= libm::log(h - l);
                }
                total
            }
        })
    }

    /// Analytic gradient of `log_prob(x)` with respect to the flattened
    /// parameter vector: `[p]` for Bernoulli, `[alpha.., beta..]` for Beta,
    /// `[mean.., std..]` for NormalDiag.
    pub fn grad_log_prob_params(&self, x: &[f64]) -> Result<Vec<f64>, ProbError> {
        self.check_shape(x)?;
        match self {
            Self::Bernoulli { p } => {
                let g = match x[0] {
                    v if v == 1.0 => 1.0 / p,
                    v if v == 0.0 => -1.0 / (1.0 - p),
                    _ => return Err(ProbError::Domain("Bernoulli value must be 0 or 1")),
                };
                Ok(vec![g])
            }
            Self::Beta { alpha, beta } => {
                let d = alpha.len();
                let mut grad = vec![0.0; 2 * d];
                for k in 0..d {
                    let (a, b, v) = (alpha[k], beta[k], x[k]);
                    if !(v > 0.0 && v < 1.0) {
                        return Err(ProbError::Domain("Beta gradient needs x in (0, 1)"));
                    }
                    let common = digamma(a + b);
                    grad[k] = libm::log(v) - digamma(a) + common;
                    grad[d + k] = libm::log1p(-v) - digamma(b) + common;
                }
                Ok(grad)
            }
            Self::NormalDiag { mean, std } => {
                let d = mean.len();
                let mut grad = vec![0.0; 2 * d];
                for k in 0..d {
                    let (m, s) = (mean[k], std[k]);
                    let r = x[k] - m;
                    grad[k] = r / (s * s);
                    grad[d + k] = r * r / (s * s * s) - 1.0 / s;
                }
                Ok(grad)
            }
            Self::Uniform { .. } => Err(ProbError::UnsupportedGradient("Uniform")),
        }
    }

    /// Flattened parameter vector in the layout of
    /// [`Self::grad_log_prob_params`].
    pub fn params(&self) -> Vec<f64> {
        match self {
            Self::Bernoulli { p } => vec![*p],
            Self::Beta { alpha, beta } => alpha.iter().chain(beta).copied().collect(),
            Self::NormalDiag { mean, std } => mean.iter().chain(std).copied().collect(),
            Self::Uniform { lo, hi } => lo.iter().chain(hi).copied().collect(),
        }
    }

    /// Same family and dimension, parameters replaced by `params`
    /// (flattened layout).
    pub fn with_params(&self, params: &[f64]) -> Result<Self, ProbError> {
        if params.len() != self.param_count() {
            return Err(ProbError::Shape { expected: self.param_count(), got: params.len() });
        }
        let d = self.dim();
        match self {
            Self::Bernoulli { .. } => Self::bernoulli(params[0]),
            Self::Beta { .. } => Self::beta(params[..d].to_vec(), params[d..].to_vec()),
            Self::NormalDiag { .. } => Self::normal_diag(params[..d].to_vec(), params[d..].to_vec()),
            Self::Uniform { .. } => Self::uniform(params[..d].to_vec(), params[d..].to_vec()),
        }
    }
}
