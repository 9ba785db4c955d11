use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{elbo_gradient, Baselines, ParamGrads, ParamStore, Program, SviError};
use crate::prob::RandomStream;

#[derive(Clone, Debug, Default, PartialEq)]
struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u32,
}

/// Adam with per-parameter gradient-norm clipping, stepping in the ascent
/// direction. Parameters whose gradient contains a non-finite entry are
/// skipped for that step and counted in [`ClippedAdam::skipped`].
#[derive(Clone, Debug, PartialEq)]
pub struct ClippedAdam {
    pub lr: f64,
    pub clip_norm: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step_count: u64,
    skipped: u64,
    state: BTreeMap<String, Moments>,
}

impl ClippedAdam {
    pub fn new(lr: f64, clip_norm: f64) -> Self {
        Self {
            lr,
            clip_norm,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step_count: 0,
            skipped: 0,
            state: BTreeMap::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn skipped(&self) -> u64 {
        self.skipped
    }

    /// First and second moments for `name`, if it has been stepped.
    pub fn moments(&self, name: &str) -> Option<(&[f64], &[f64])> {
        self.state.get(name).map(|s| (s.m.as_slice(), s.v.as_slice()))
    }

    pub fn step(&mut self, params: &mut ParamStore, grads: &ParamGrads) -> Result<(), SviError> {
        let names: Vec<String> = params.names().map(String::from).collect();
        for name in &names {
            if !grads.contains_key(name) {
                return Err(SviError::MissingGradient(name.clone()));
            }
        }
        self.step_count += 1;
        for name in names {
            let g = &grads[&name];
            let raw = params.raw_mut(&name).expect("name from store");
            if g.len() != raw.len() {
                return Err(SviError::ParamLayout(name));
            }
            if g.iter().any(|v| !v.is_finite()) {
                self.skipped += 1;
                continue;
            }
            let norm = libm::sqrt(g.iter().map(|v| v * v).sum::<f64>());
            let scale = if norm > self.clip_norm { self.clip_norm / norm } else { 1.0 };
            let st = self.state.entry(name).or_insert_with(|| Moments {
                m: vec![0.0; raw.len()],
                v: vec![0.0; raw.len()],
                t: 0,
            });
            st.t += 1;
            let bc1 = 1.0 - libm::pow(self.beta1, st.t as f64);
            let bc2 = 1.0 - libm::pow(self.beta2, st.t as f64);
            for k in 0..raw.len() {
                let gk = g[k] * scale;
                st.m[k] = self.beta1 * st.m[k] + (1.0 - self.beta1) * gk;
                st.v[k] = self.beta2 * st.v[k] + (1.0 - self.beta2) * gk * gk;
                let m_hat = st.m[k] / bc1;
                let v_hat = st.v[k] / bc2;
                raw[k] += self.lr * m_hat / (libm::sqrt(v_hat) + self.eps);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct SviConfig {
    pub iterations: usize,
    pub particles: usize,
    pub learning_rate: f64,
    pub clip_norm: f64,
    pub baseline_decay: f64,
}

impl Default for SviConfig {
    fn default() -> Self {
        Self {
            iterations: 40,
            particles: 4,
            learning_rate: 0.1,
            clip_norm: 10.0,
            baseline_decay: 0.9,
        }
    }
}

impl SviConfig {
    pub fn validate(&self) -> Result<(), SviError> {
        if self.particles == 0 {
            return Err(SviError::InvalidConfig("svi.particles"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(SviError::InvalidConfig("svi.learning_rate"));
        }
        if !(self.clip_norm > 0.0) {
            return Err(SviError::InvalidConfig("svi.clip_norm"));
        }
        if !(0.0..1.0).contains(&self.baseline_decay) {
            return Err(SviError::InvalidConfig("svi.baseline_decay"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SviOutcome {
    pub params: ParamStore,
    pub elbo_history: Vec<f64>,
    pub skipped_updates: u64,
    pub nonfinite_elbos: usize,
}

/// Runs `iterations` rounds of gradient estimation followed by a clipped
/// Adam step.
pub fn optimize<M, G>(model: &M, guide: &G, init: ParamStore, config: &SviConfig, rng: &mut RandomStream) -> Result<SviOutcome, SviError>
where
    M: Program + ?Sized,
    G: Program + ?Sized,
{
    config.validate()?;
    let mut params = init;
    let mut optimizer = ClippedAdam::new(config.learning_rate, config.clip_norm);
    let mut baselines = Baselines::new(config.baseline_decay);
    let mut history = Vec::with_capacity(config.iterations);
    let mut nonfinite = 0;
    let base = rng.fork();
    for it in 0..config.iterations {
        let mut irng = base.split(it as u64);
        let est = elbo_gradient(model, guide, &params, config.particles, &mut baselines, &mut irng)?;
        if !est.elbo.is_finite() {
            nonfinite += 1;
        }
        history.push(est.elbo);
        optimizer.step(&mut params, &est.grads)?;
    }
    Ok(SviOutcome {
        params,
        elbo_history: history,
        skipped_updates: optimizer.skipped(),
        nonfinite_elbos: nonfinite,
    })
}
