use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{ParamStore, SampleRecord, SviError, Trace};
use crate::prob::{Distribution, RandomStream};

/// A probabilistic program: a procedure that declares sample sites through
/// a [`Context`]. For fixed structural inputs it must declare the same
/// sites in the same order on every execution.
pub trait Program {
    fn run(&self, ctx: &mut Context<'_>) -> Result<(), SviError>;
}

impl<F> Program for F
where
    F: Fn(&mut Context<'_>) -> Result<(), SviError>,
{
    fn run(&self, ctx: &mut Context<'_>) -> Result<(), SviError> {
        self(ctx)
    }
}

/// Execution context handed to a [`Program`].
pub struct Context<'a> {
    params: &'a ParamStore,
    replay: Option<&'a Trace>,
    rng: &'a mut RandomStream,
    trace: Trace,
}

impl<'a> Context<'a> {
    pub fn new(params: &'a ParamStore, replay: Option<&'a Trace>, rng: &'a mut RandomStream) -> Self {
        Self { params, replay, rng, trace: Trace::new() }
    }

    /// Exposed values of a stored parameter.
    pub fn param(&self, name: &str) -> Result<Vec<f64>, SviError> {
        self.params.get(name).ok_or_else(|| SviError::UnknownParam(name.to_string()))
    }

    /// Random stream for auxiliary (non-site) randomness such as nested
    /// Monte-Carlo estimates.
    pub fn rng(&mut self) -> &mut RandomStream {
        self.rng
    }

    /// Latent site with fixed parameters.
    pub fn sample(&mut self, name: &str, dist: Distribution) -> Result<Vec<f64>, SviError> {
        self.latent(name, dist, false, Vec::new())
    }

    /// Latent site declared identically by both model and guide.
    pub fn sample_shared(&mut self, name: &str, dist: Distribution) -> Result<Vec<f64>, SviError> {
        self.latent(name, dist, true, Vec::new())
    }

    /// Latent site whose flattened parameter vector is the concatenation of
    /// the exposed values of `params`, in order.
    pub fn sample_param(&mut self, name: &str, dist: Distribution, params: &[&str]) -> Result<Vec<f64>, SviError> {
        let mut expected = 0;
        for p in params {
            expected += self
                .params
                .raw(p)
                .ok_or_else(|| SviError::UnknownParam((*p).to_string()))?
                .len();
        }
        if expected != dist.param_count() {
            return Err(SviError::ParamLayout(name.to_string()));
        }
        let names = params.iter().map(|p| (*p).to_string()).collect();
        self.latent(name, dist, false, names)
    }

    pub fn observe(&mut self, name: &str, dist: Distribution, value: Vec<f64>) -> Result<(), SviError> {
        self.check_unique(name)?;
        let log_prob = dist.log_prob(&value)?;
        self.trace.push(SampleRecord {
            name: name.to_string(),
            distribution: dist,
            value,
            observed: true,
            log_prob,
            shared: false,
            params: Vec::new(),
        });
        Ok(())
    }

    fn check_unique(&self, name: &str) -> Result<(), SviError> {
        if self.trace.get(name).is_some() {
            return Err(SviError::DuplicateSite(name.to_string()));
        }
        Ok(())
    }

    fn latent(&mut self, name: &str, dist: Distribution, shared: bool, params: Vec<String>) -> Result<Vec<f64>, SviError> {
        self.check_unique(name)?;
        let replayed = self
            .replay
            .and_then(|t| t.get(name))
            .filter(|r| !r.observed)
            .map(|r| r.value.clone());
        let value = match replayed {
            Some(v) => v,
            None => dist.sample(self.rng),
        };
        let log_prob = dist.log_prob(&value)?;
        self.trace.push(SampleRecord {
            name: name.to_string(),
            distribution: dist,
            value: value.clone(),
            observed: false,
            log_prob,
            shared,
            params,
        });
        Ok(value)
    }

    pub fn into_trace(self) -> Trace {
        self.trace
    }
}

/// Runs `program`, replaying latent values from `guide_trace` when given.
///
/// Every latent site of the guide trace must be declared as a latent site
/// by the program; otherwise the run fails with a site mismatch.
pub fn run_model<P: Program + ?Sized>(
    program: &P,
    params: &ParamStore,
    guide_trace: Option<&Trace>,
    rng: &mut RandomStream,
) -> Result<Trace, SviError> {
    let mut ctx = Context::new(params, guide_trace, rng);
    program.run(&mut ctx)?;
    let trace = ctx.into_trace();
    if let Some(guide) = guide_trace {
        for record in guide.latent() {
            match trace.get(&record.name) {
                Some(r) if !r.observed => {}
                _ => return Err(SviError::SiteMismatch(record.name.clone())),
            }
        }
    }
    Ok(trace)
}
