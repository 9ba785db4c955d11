use alloc::string::String;
use alloc::vec::Vec;

use super::{lautum_from_samples, DecisionConfig, IdiomError};
use crate::prob::{prob_and, prob_or, smooth_indicator, Distribution, ProbError, RandomStream};

/// A positive-or-free guide parameter declared by an environment, replicated
/// once per planning step.
#[derive(Clone, Debug, PartialEq)]
pub struct GuideParam {
    pub name: String,
    pub init: Vec<f64>,
    pub positive: bool,
}

/// The procedures an environment supplies to the decision idiom. States are
/// flat real vectors. Modalities and constraints are addressed by index.
pub trait EnvironmentModel {
    /// One long-term-memory sample for a modality.
    type Ltm: PartialEq;
    /// One perception sample for a modality.
    type Percept;

    /// Distribution of the current state.
    fn initial_state(&self) -> Distribution;

    fn motor_prior(&self, state: &[f64]) -> Result<Distribution, ProbError>;

    /// Guide parameters for one planning step, in the order
    /// [`EnvironmentModel::motor_guide`] consumes them.
    fn guide_params(&self) -> Vec<GuideParam>;

    fn motor_guide(&self, state: &[f64], params: &[Vec<f64>]) -> Result<Distribution, ProbError>;

    fn transition(&self, state: &[f64], motor: &[f64]) -> Result<Distribution, ProbError>;

    /// `count` draws from the memory prior of `modality`.
    fn sample_ltm(&self, modality: usize, state: &[f64], count: usize, rng: &mut RandomStream) -> Vec<Self::Ltm>;

    /// `count` draws from the perception prior of `modality`.
    fn sample_percept_prior(&self, modality: usize, state: &[f64], count: usize, rng: &mut RandomStream) -> Vec<Self::Percept>;

    fn perception_log_likelihood(&self, modality: usize, state: &[f64], ltm: &Self::Ltm, percept: &Self::Percept) -> f64;

    /// One draw from the perception likelihood given a memory sample.
    fn sample_percept(&self, modality: usize, state: &[f64], ltm: &Self::Ltm, rng: &mut RandomStream) -> Self::Percept;

    /// Signed distance to the constraint set; positive means satisfied.
    fn constraint_distance(
        &self,
        constraint: usize,
        state: &[f64],
        percept: &Self::Percept,
        ltm: &Self::Ltm,
        cfg: &DecisionConfig,
    ) -> f64;

    fn smooth_indicator(&self, _constraint: usize, distance: f64, cfg: &DecisionConfig) -> f64 {
        smooth_indicator(distance, cfg.sigma_c)
    }

    /// Modalities examined for information gain.
    fn information_subset(&self, cfg: &DecisionConfig, rng: &mut RandomStream) -> Result<Vec<usize>, IdiomError>;

    /// Constraints checked.
    fn constraint_subset(&self, cfg: &DecisionConfig, rng: &mut RandomStream) -> Result<Vec<usize>, IdiomError>;
}

/// Lautum estimate for one modality at `state`.
pub fn modality_information<E: EnvironmentModel + ?Sized>(
    env: &E,
    modality: usize,
    state: &[f64],
    cfg: &DecisionConfig,
    rng: &mut RandomStream,
) -> Result<f64, IdiomError> {
    let xs = env.sample_ltm(modality, state, cfg.lautum_inner, rng);
    let ys = env.sample_percept_prior(modality, state, cfg.lautum_outer, rng);
    lautum_from_samples(&xs, &ys, |y, x| env.perception_log_likelihood(modality, state, x, y))
}

/// `max_j (1 − e^{−σ_I I_j})` over the subset.
pub fn information_probability<E: EnvironmentModel + ?Sized>(
    env: &E,
    state: &[f64],
    subset: &[usize],
    cfg: &DecisionConfig,
    rng: &mut RandomStream,
) -> Result<f64, IdiomError> {
    if subset.is_empty() {
        return Err(IdiomError::EmptySubset);
    }
    let mut best: f64 = 0.0;
    for &j in subset {
        let info = modality_information(env, j, state, cfg, rng)?;
        best = best.max(1.0 - libm::exp(-cfg.sigma_i * info));
    }
    Ok(best.clamp(0.0, 1.0))
}

/// Mean smoothed indicator of one constraint over `G` memory/perception
/// draws.
pub fn constraint_satisfaction<E: EnvironmentModel + ?Sized>(
    env: &E,
    constraint: usize,
    state: &[f64],
    cfg: &DecisionConfig,
    rng: &mut RandomStream,
) -> Result<f64, IdiomError> {
    let ltms = env.sample_ltm(constraint, state, cfg.constraint_samples, rng);
    if ltms.is_empty() {
        return Err(IdiomError::EmptySamples);
    }
    let mut sum = 0.0;
    for ltm in &ltms {
        let percept = env.sample_percept(constraint, state, ltm, rng);
        let d = env.constraint_distance(constraint, state, &percept, ltm, cfg);
        sum += env.smooth_indicator(constraint, d, cfg);
    }
    Ok(sum / ltms.len() as f64)
}

/// Conjunction of per-constraint satisfaction means.
pub fn constraint_probability<E: EnvironmentModel + ?Sized>(
    env: &E,
    state: &[f64],
    subset: &[usize],
    cfg: &DecisionConfig,
    rng: &mut RandomStream,
) -> Result<f64, IdiomError> {
    if subset.is_empty() {
        return Err(IdiomError::EmptySubset);
    }
    let mut means = Vec::with_capacity(subset.len());
    for &h in subset {
        means.push(constraint_satisfaction(env, h, state, cfg, rng)?.clamp(0.0, 1.0));
    }
    Ok(prob_and(&means)?)
}

/// `(P_p ∨ P_i) ∧ P_c` for independent events.
pub fn attention_probability(progress: f64, information: f64, constraint: f64) -> Result<f64, IdiomError> {
    let either = prob_or(progress, information)?;
    Ok(prob_and(&[either, constraint])?)
}
