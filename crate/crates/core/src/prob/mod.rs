//! Distributions, special functions, scalar kernels and random streams.

mod distribution;
mod kernels;
mod rng;
pub mod special;

pub use distribution::Distribution;
pub use kernels::{logistic, logsumexp, prob_and, prob_or, relu, smooth_indicator, softplus, softplus_inverse};
pub use rng::RandomStream;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbError {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("gradient not supported for {0} distributions")]
    UnsupportedGradient(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
}
