//! ELBO estimation and score-function gradients.
//!
//! For a guide site `i` with parameters φ, the per-particle gradient term is
//! `(R_i − b_i) · ∂ log q_i / ∂φ`, where `R_i` sums the model-minus-guide
//! log-prob terms of every site at or after site `i`'s position in the model
//! trace (reward-to-go) and `b_i` is an exponential moving average of past
//! `R_i`. Shared sites contribute identical terms to model and guide and are
//! dropped from the sums.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{run_model, ParamGrads, ParamStore, Program, SviError, Trace};
use crate::prob::RandomStream;

/// Per-site moving-average baselines.
#[derive(Clone, Debug, PartialEq)]
pub struct Baselines {
    decay: f64,
    values: BTreeMap<String, f64>,
}

impl Baselines {
    pub fn new(decay: f64) -> Self {
        Self { decay, values: BTreeMap::new() }
    }

    pub fn get(&self, site: &str) -> f64 {
        self.values.get(site).copied().unwrap_or(0.0)
    }

    /// First observation initializes, later ones blend with `decay`.
    pub fn update(&mut self, site: &str, reward: f64) {
        if !reward.is_finite() {
            return;
        }
        match self.values.get_mut(site) {
            Some(b) => *b = self.decay * *b + (1.0 - self.decay) * reward,
            None => {
                self.values.insert(site.into(), reward);
            }
        }
    }
}

impl Default for Baselines {
    fn default() -> Self {
        Self::new(0.9)
    }
}

/// Whether shared-site terms are dropped from the reward sums. Both give
/// the same gradient; `Full` exists to check that claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewardMode {
    CancelShared,
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientEstimate {
    pub grads: ParamGrads,
    /// Mean ELBO over the particles used for the gradient.
    pub elbo: f64,
}

fn run_particle<M, G>(model: &M, guide: &G, params: &ParamStore, rng: &mut RandomStream) -> Result<(Trace, Trace), SviError>
where
    M: Program + ?Sized,
    G: Program + ?Sized,
{
    let guide_trace = run_model(guide, params, None, rng)?;
    let model_trace = run_model(model, params, Some(&guide_trace), rng)?;
    Ok((model_trace, guide_trace))
}

/// Mean over particles of `log p(model trace) − log q(guide trace)`.
pub fn elbo_estimate<M, G>(model: &M, guide: &G, params: &ParamStore, particles: usize, rng: &mut RandomStream) -> Result<f64, SviError>
where
    M: Program + ?Sized,
    G: Program + ?Sized,
{
    if particles == 0 {
        return Err(SviError::NoParticles);
    }
    let base = rng.fork();
    let mut total = 0.0;
    for p in 0..particles {
        let mut prng = base.split(p as u64);
        let (m, g) = run_particle(model, guide, params, &mut prng)?;
        total += m.total_log_prob() - g.total_log_prob();
    }
    Ok(total / particles as f64)
}

/// Reward-to-go for each guide record index (`None` for sites without a
/// score term).
pub(crate) fn rewards_to_go(model: &Trace, guide: &Trace, mode: RewardMode) -> Vec<Option<f64>> {
    let n = model.len();
    let keep = |shared: bool| mode == RewardMode::Full || !shared;
    let mut cost = vec![0.0; n + 1];
    for (k, r) in model.records().iter().enumerate() {
        if keep(r.shared) {
            cost[k] += r.log_prob;
        }
    }
    let positions: Vec<usize> = guide
        .records()
        .iter()
        .map(|r| model.position(&r.name).unwrap_or(n))
        .collect();
    for (r, &pos) in guide.records().iter().zip(&positions) {
        if keep(r.shared) {
            cost[pos] -= r.log_prob;
        }
    }
    for k in (0..n).rev() {
        cost[k] += cost[k + 1];
    }
    guide
        .records()
        .iter()
        .zip(&positions)
        .map(|(r, &pos)| (!r.observed && !r.params.is_empty()).then(|| cost[pos]))
        .collect()
}

/// Score-function estimate of ∂ELBO/∂(raw parameters), averaged over
/// `particles`. Baselines are read before and updated after the particles
/// run, so the estimate stays unbiased.
pub fn elbo_gradient<M, G>(
    model: &M,
    guide: &G,
    params: &ParamStore,
    particles: usize,
    baselines: &mut Baselines,
    rng: &mut RandomStream,
) -> Result<GradientEstimate, SviError>
where
    M: Program + ?Sized,
    G: Program + ?Sized,
{
    elbo_gradient_with(model, guide, params, particles, baselines, RewardMode::CancelShared, rng)
}

pub fn elbo_gradient_with<M, G>(
    model: &M,
    guide: &G,
    params: &ParamStore,
    particles: usize,
    baselines: &mut Baselines,
    mode: RewardMode,
    rng: &mut RandomStream,
) -> Result<GradientEstimate, SviError>
where
    M: Program + ?Sized,
    G: Program + ?Sized,
{
    if particles == 0 {
        return Err(SviError::NoParticles);
    }
    let mut grads: ParamGrads = params
        .names()
        .map(|name| (String::from(name), vec![0.0; params.raw(name).map_or(0, <[f64]>::len)]))
        .collect();
    let mut reward_sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut elbo_total = 0.0;
    let base = rng.fork();

    for p in 0..particles {
        let mut prng = base.split(p as u64);
        let (model_trace, guide_trace) = run_particle(model, guide, params, &mut prng)?;
        elbo_total += model_trace.total_log_prob() - guide_trace.total_log_prob();
        let rewards = rewards_to_go(&model_trace, &guide_trace, mode);
        for (record, reward) in guide_trace.records().iter().zip(rewards) {
            let Some(reward) = reward else { continue };
            let centred = reward - baselines.get(&record.name);
            let score = record.distribution.grad_log_prob_params(&record.value)?;
            let mut offset = 0;
            for pname in &record.params {
                let len = params.raw(pname).map_or(0, <[f64]>::len);
                let slot = grads.get_mut(pname).ok_or_else(|| SviError::UnknownParam(pname.clone()))?;
                for k in 0..len {
                    slot[k] += centred * score[offset + k] * params.jacobian(pname, k);
                }
                offset += len;
            }
            let entry = reward_sums.entry(record.name.clone()).or_insert((0.0, 0));
            if reward.is_finite() {
                entry.0 += reward;
                entry.1 += 1;
            }
        }
    }

    let scale = 1.0 / particles as f64;
    for g in grads.values_mut() {
        g.iter_mut().for_each(|v| *v *= scale);
    }
    for (site, (sum, count)) in reward_sums {
        if count > 0 {
            baselines.update(&site, sum / count as f64);
        }
    }
    Ok(GradientEstimate { grads, elbo: elbo_total * scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Distribution;
    use crate::svi::Context;
    use approx::assert_relative_eq;

    fn beta_guide(ctx: &mut Context<'_>) -> Result<(), SviError> {
        let a = ctx.param("a")?;
        let b = ctx.param("b")?;
        ctx.sample_param("z", Distribution::beta(a, b)?, &["a", "b"])?;
        Ok(())
    }

    fn beta25_model(ctx: &mut Context<'_>) -> Result<(), SviError> {
        ctx.sample("z", Distribution::beta1(2.0, 5.0)?)?;
        Ok(())
    }

    fn store(a: f64, b: f64) -> ParamStore {
        let mut s = ParamStore::new();
        s.insert("a", vec![a], true).unwrap();
        s.insert("b", vec![b], true).unwrap();
        s
    }

    #[test]
    fn fully_observed_model_has_exact_elbo() {
        let model = |ctx: &mut Context<'_>| ctx.observe("x", Distribution::bernoulli(0.8)?, vec![1.0]);
        let guide = |_: &mut Context<'_>| Ok(());
        let mut rng = RandomStream::new(1, 0);
        for n in [1, 3, 50] {
            let e = elbo_estimate(&model, &guide, &ParamStore::new(), n, &mut rng).unwrap();
            assert_relative_eq!(e, libm::log(0.8), epsilon = 1e-12);
        }
        assert_eq!(elbo_estimate(&model, &guide, &ParamStore::new(), 0, &mut rng), Err(SviError::NoParticles));
    }

    #[test]
    fn guide_equal_to_prior_has_zero_elbo() {
        let mut rng = RandomStream::new(2, 0);
        let e = elbo_estimate(&beta25_model, &beta_guide, &store(2.0, 5.0), 10_000, &mut rng).unwrap();
        assert!(e.abs() <= 0.02, "{e}");
    }

    #[test]
    fn observed_only_guide_gives_zero_gradient() {
        let model = |ctx: &mut Context<'_>| ctx.observe("x", Distribution::bernoulli(0.8)?, vec![1.0]);
        let guide = |ctx: &mut Context<'_>| ctx.observe("x", Distribution::bernoulli(0.8)?, vec![1.0]);
        let mut params = ParamStore::new();
        params.insert("unused", vec![1.0], true).unwrap();
        let mut rng = RandomStream::new(3, 0);
        let mut b = Baselines::default();
        let g = elbo_gradient(&model, &guide, &params, 5, &mut b, &mut rng).unwrap();
        assert!(g.grads.values().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_reward_vanishes_once_baseline_is_warm() {
        // Guide and model agree except for a constant observed term, so the
        // reward-to-go is that constant for every particle.
        let model = |ctx: &mut Context<'_>| {
            let a = ctx.param("a")?;
            let b = ctx.param("b")?;
            ctx.sample("z", Distribution::beta(a, b)?)?;
            ctx.observe("x", Distribution::bernoulli(0.3)?, vec![1.0])
        };
        let params = store(1.5, 2.5);
        let mut rng = RandomStream::new(4, 0);
        let mut baselines = Baselines::default();
        for _ in 0..300 {
            elbo_gradient(&model, &beta_guide, &params, 1, &mut baselines, &mut rng).unwrap();
        }
        let g = elbo_gradient(&model, &beta_guide, &params, 1, &mut baselines, &mut rng).unwrap();
        for v in g.grads.values().flatten() {
            assert!(v.abs() <= 1e-6, "{v}");
        }
    }

    #[test]
    fn shared_sites_cancel_exactly() {
        let model = |ctx: &mut Context<'_>| {
            let u = ctx.sample("u", Distribution::uniform(vec![0.0], vec![1.0])?)?;
            let s = ctx.sample_shared("s", Distribution::normal_diag(vec![u[0]], vec![0.1])?)?;
            ctx.observe("x", Distribution::bernoulli((s[0].clamp(0.0, 1.0) * 0.9 + 0.05).clamp(0.0, 1.0))?, vec![1.0])
        };
        let guide = |ctx: &mut Context<'_>| {
            let a = ctx.param("a")?;
            let b = ctx.param("b")?;
            let u = ctx.sample_param("u", Distribution::beta(a, b)?, &["a", "b"])?;
            ctx.sample_shared("s", Distribution::normal_diag(vec![u[0]], vec![0.1])?)?;
            Ok(())
        };
        let params = store(1.3, 0.8);
        let rng = RandomStream::new(5, 0);
        let mut b1 = Baselines::default();
        let mut b2 = Baselines::default();
        let g1 = elbo_gradient_with(&model, &guide, &params, 20, &mut b1, RewardMode::CancelShared, &mut rng.clone()).unwrap();
        let g2 = elbo_gradient_with(&model, &guide, &params, 20, &mut b2, RewardMode::Full, &mut rng.clone()).unwrap();
        for (k, v) in &g1.grads {
            for (x, y) in v.iter().zip(&g2.grads[k]) {
                assert_relative_eq!(x, y, epsilon = 1e-12);
            }
        }
        assert_eq!(g1.elbo, g2.elbo);
    }

    /// Quadrature oracle for ∂(−KL(Beta(a,b) ‖ Beta(2,5)))/∂(a, b) in exposed
    /// coordinates, via midpoint-rule KL and central differences.
    fn neg_kl_quadrature(a: f64, b: f64) -> f64 {
        let q = Distribution::beta1(a, b).unwrap();
        let p = Distribution::beta1(2.0, 5.0).unwrap();
        let n = 200_000;
        let h = 1.0 / n as f64;
        (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                let lq = q.log_prob(&[x]).unwrap();
                libm::exp(lq) * (p.log_prob(&[x]).unwrap() - lq) * h
            })
            .sum()
    }

    #[test]
    fn gradient_direction_matches_quadrature_oracle() {
        let eps = 1e-4;
        let da = (neg_kl_quadrature(1.0 + eps, 1.0) - neg_kl_quadrature(1.0 - eps, 1.0)) / (2.0 * eps);
        let db = (neg_kl_quadrature(1.0, 1.0 + eps) - neg_kl_quadrature(1.0, 1.0 - eps)) / (2.0 * eps);
        assert!(db > da);

        let params = store(1.0, 1.0);
        let mut rng = RandomStream::new(6, 0);
        let mut baselines = Baselines::default();
        let g = elbo_gradient(&beta25_model, &beta_guide, &params, 100_000, &mut baselines, &mut rng).unwrap();
        // raw-space gradients share the same positive Jacobian here
        assert!(g.grads["b"][0] > g.grads["a"][0]);
    }
}
