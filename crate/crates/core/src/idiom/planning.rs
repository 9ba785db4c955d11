use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{
    attention_probability, constraint_probability, information_probability, progress_probability_clamped,
    DecisionConfig, EnvironmentModel, IdiomError, PastStateBuffer,
};
use crate::prob::{Distribution, RandomStream};
use crate::svi::{optimize, run_model, Context, ParamStore, Program, SviConfig, SviError};

impl From<IdiomError> for SviError {
    fn from(e: IdiomError) -> Self {
        match e {
            IdiomError::Svi(inner) => inner,
            IdiomError::Prob(inner) => SviError::Prob(inner),
            other => SviError::Program(other.to_string()),
        }
    }
}

pub fn motor_site(tau: usize) -> String {
    format!("motor_{tau}")
}

pub fn state_site(tau: usize) -> String {
    format!("state_{tau}")
}

pub fn attention_site(tau: usize) -> String {
    format!("attention_{tau}")
}

fn param_name(base: &str, tau: usize) -> String {
    format!("{base}_{tau}")
}

/// The three pseudo-probabilities at one state and their combination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttentionTerms {
    pub progress: f64,
    pub information: f64,
    pub constraint: f64,
    pub attention: f64,
}

/// Evaluates progress, information and constraint terms at `state`, which
/// was drawn from `pred`.
#[allow(clippy::too_many_arguments)]
pub fn attention_terms<E: EnvironmentModel + ?Sized>(
    env: &E,
    pred: &Distribution,
    state: &[f64],
    buffer: &PastStateBuffer,
    info_subset: &[usize],
    constraint_subset: &[usize],
    cfg: &DecisionConfig,
    rng: &mut RandomStream,
) -> Result<AttentionTerms, IdiomError> {
    let progress = progress_probability_clamped(buffer, pred, state, cfg)?;
    let information = information_probability(env, state, info_subset, cfg, rng)?;
    let constraint = constraint_probability(env, state, constraint_subset, cfg, rng)?;
    let attention = attention_probability(progress, information, constraint)?;
    Ok(AttentionTerms { progress, information, constraint, attention })
}

/// Rollout model: motor prior, transition and an observed attention site
/// per future step.
pub struct PlanningModel<'a, E: ?Sized> {
    env: &'a E,
    start: Vec<f64>,
    buffer: &'a PastStateBuffer,
    cfg: &'a DecisionConfig,
    subsets: Vec<(Vec<usize>, Vec<usize>)>,
}

impl<E: EnvironmentModel + ?Sized> PlanningModel<'_, E> {
    /// Modality and constraint subsets used at each step.
    pub fn subsets(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.subsets
    }
}

impl<E: EnvironmentModel + ?Sized> Program for PlanningModel<'_, E> {
    fn run(&self, ctx: &mut Context<'_>) -> Result<(), SviError> {
        let mut state = self.start.clone();
        for (k, (info, cons)) in self.subsets.iter().enumerate() {
            let tau = k + 1;
            let u = ctx.sample(&motor_site(tau), self.env.motor_prior(&state)?)?;
            let trans = self.env.transition(&state, &u)?;
            let next = ctx.sample_shared(&state_site(tau), trans.clone())?;
            let terms = attention_terms(self.env, &trans, &next, self.buffer, info, cons, self.cfg, ctx.rng())?;
            let p = terms.attention.clamp(self.cfg.attention_floor, 1.0);
            ctx.observe(&attention_site(tau), Distribution::bernoulli(p)?, vec![1.0])?;
            state = next;
        }
        Ok(())
    }
}

/// Guide: parameterized motor distribution plus the model's transition.
pub struct PlanningGuide<'a, E: ?Sized> {
    env: &'a E,
    start: Vec<f64>,
    names: Vec<Vec<String>>,
}

impl<E: EnvironmentModel + ?Sized> Program for PlanningGuide<'_, E> {
    fn run(&self, ctx: &mut Context<'_>) -> Result<(), SviError> {
        let mut state = self.start.clone();
        for (k, names) in self.names.iter().enumerate() {
            let tau = k + 1;
            let mut values = Vec::with_capacity(names.len());
            for n in names {
                values.push(ctx.param(n)?);
            }
            let dist = self.env.motor_guide(&state, &values)?;
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let u = ctx.sample_param(&motor_site(tau), dist, &refs)?;
            let trans = self.env.transition(&state, &u)?;
            state = ctx.sample_shared(&state_site(tau), trans)?;
        }
        Ok(())
    }
}

pub struct PlanningProgram<'a, E: ?Sized> {
    pub model: PlanningModel<'a, E>,
    pub guide: PlanningGuide<'a, E>,
    pub init: ParamStore,
}

/// Builds the rollout model and guide over `cfg.plan_horizon` steps from
/// the mean of `current`. Sub-sampled modality sets are drawn here, once
/// per step.
pub fn planning_program<'a, E: EnvironmentModel + ?Sized>(
    env: &'a E,
    current: &Distribution,
    buffer: &'a PastStateBuffer,
    cfg: &'a DecisionConfig,
    rng: &mut RandomStream,
) -> Result<PlanningProgram<'a, E>, IdiomError> {
    if cfg.plan_horizon == 0 {
        return Err(IdiomError::EmptyProgram);
    }
    cfg.validate()?;
    current.validate()?;
    if buffer.is_empty() {
        return Err(IdiomError::InsufficientHistory { needed: 1, available: 0 });
    }
    let start = current.mean();
    let specs = env.guide_params();
    let mut init = ParamStore::new();
    let mut names = Vec::with_capacity(cfg.plan_horizon);
    let mut subsets = Vec::with_capacity(cfg.plan_horizon);
    for tau in 1..=cfg.plan_horizon {
        let mut step = Vec::with_capacity(specs.len());
        for spec in &specs {
            let name = param_name(&spec.name, tau);
            init.insert(&name, spec.init.clone(), spec.positive)?;
            step.push(name);
        }
        names.push(step);
        let info = env.information_subset(cfg, rng)?;
        let cons = env.constraint_subset(cfg, rng)?;
        if info.is_empty() || cons.is_empty() {
            return Err(IdiomError::EmptySubset);
        }
        subsets.push((info, cons));
    }
    Ok(PlanningProgram {
        model: PlanningModel { env, start: start.clone(), buffer, cfg, subsets },
        guide: PlanningGuide { env, start, names },
        init,
    })
}

/// Optimized guide parameters for one planning step, keyed by the
/// environment's parameter names.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VariationalParams {
    pub step: usize,
    pub values: BTreeMap<String, Vec<f64>>,
}

/// One guide rollout.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub motors: Vec<Vec<f64>>,
    pub states: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Plan {
    pub step_params: Vec<VariationalParams>,
    pub trajectories: Vec<Trajectory>,
    /// Mean of the first-step motor samples.
    pub first_motor_mean: Vec<f64>,
    pub elbo_history: Vec<f64>,
    pub skipped_updates: u64,
}

impl Plan {
    pub fn horizon(&self) -> usize {
        self.step_params.len()
    }

    /// First-step motor samples across trajectories.
    pub fn first_motors(&self) -> impl Iterator<Item = &[f64]> {
        self.trajectories.iter().filter_map(|t| t.motors.first().map(Vec::as_slice))
    }
}

/// Fits the guide to the planning model, then draws `cfg.action_samples`
/// rollouts from it.
pub fn make_plan<E: EnvironmentModel + ?Sized>(
    env: &E,
    current: &Distribution,
    buffer: &PastStateBuffer,
    cfg: &DecisionConfig,
    svi: &SviConfig,
    rng: &mut RandomStream,
) -> Result<Plan, IdiomError> {
    let program = planning_program(env, current, buffer, cfg, rng)?;
    let outcome = optimize(&program.model, &program.guide, program.init, svi, rng)?;
    let specs = env.guide_params();
    let step_params = (1..=cfg.plan_horizon)
        .map(|tau| {
            let values = specs
                .iter()
                .map(|s| {
                    let v = outcome.params.get(&param_name(&s.name, tau)).expect("declared parameter");
                    (s.name.clone(), v)
                })
                .collect();
            VariationalParams { step: tau, values }
        })
        .collect();
    let sampler = rng.fork();
    let mut trajectories = Vec::with_capacity(cfg.action_samples);
    for i in 0..cfg.action_samples {
        let mut r = sampler.split(i as u64);
        let trace = run_model(&program.guide, &outcome.params, None, &mut r)?;
        let mut t = Trajectory { motors: Vec::new(), states: Vec::new() };
        for tau in 1..=cfg.plan_horizon {
            let m = trace.get(&motor_site(tau)).ok_or(IdiomError::EmptyProgram)?;
            let s = trace.get(&state_site(tau)).ok_or(IdiomError::EmptyProgram)?;
            t.motors.push(m.value.clone());
            t.states.push(s.value.clone());
        }
        trajectories.push(t);
    }
    let dim = trajectories[0].motors[0].len();
    let mut first_motor_mean = vec![0.0; dim];
    for t in &trajectories {
        for (acc, v) in first_motor_mean.iter_mut().zip(&t.motors[0]) {
            *acc += v;
        }
    }
    for v in &mut first_motor_mean {
        *v /= trajectories.len() as f64;
    }
    Ok(Plan {
        step_params,
        trajectories,
        first_motor_mean,
        elbo_history: outcome.elbo_history,
        skipped_updates: outcome.skipped_updates,
    })
}
