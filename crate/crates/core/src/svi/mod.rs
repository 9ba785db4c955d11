//! Trace-based stochastic variational inference.
//!
//! Programs declare sample sites through a [`Context`]. A guide run records
//! latent values; the model run replays them and scores everything,
//! including observed sites. [`optimize`] alternates score-function
//! gradient estimates with clipped Adam ascent steps.

mod elbo;
mod optim;
mod params;
mod program;
mod trace;

pub use elbo::{elbo_estimate, elbo_gradient, elbo_gradient_with, Baselines, GradientEstimate, RewardMode};
pub use optim::{optimize, ClippedAdam, SviConfig, SviOutcome};
pub use params::{ParamGrads, ParamStore};
pub use program::{run_model, Context, Program};
pub use trace::{SampleRecord, Trace};

use alloc::string::String;

use crate::prob::ProbError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SviError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("sample site `{0}` declared twice")]
    DuplicateSite(String),
    #[error("guide site `{0}` has no latent counterpart in the model")]
    SiteMismatch(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("invalid value for parameter `{0}`")]
    InvalidParam(String),
    #[error("parameter layout does not match distribution at `{0}`")]
    ParamLayout(String),
    #[error("no gradient supplied for parameter `{0}`")]
    MissingGradient(String),
    #[error("at least one particle is required")]
    NoParticles,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("program failed: {0}")]
    Program(String),
}
