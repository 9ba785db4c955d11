use super::IdiomError;

/// Which log-ratio goes inside the ReLU of the one-point progress estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProgressSign {
    /// `log p_pred(ẑ) − log p_past(ẑ)`: large when ẑ is far from the past
    /// state.
    #[default]
    PredMinusPast,
    /// `log p_past(ẑ) − log p_pred(ẑ)`.
    PastMinusPred,
}

/// Scales, sample counts and horizons of the decision model.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct DecisionConfig {
    /// Progress scale (1/nat).
    pub sigma_p: f64,
    /// Information scale (1/nat).
    pub sigma_i: f64,
    /// Constraint steepness (1/m).
    pub sigma_c: f64,
    /// Weight on the most recent past state, in (0, 1].
    pub lambda_p_min: f64,
    /// Number of past states compared against (L).
    pub past_states: usize,
    /// Planning horizon in steps.
    pub plan_horizon: usize,
    /// Capacity of the past-state buffer.
    pub past_capacity: usize,
    /// Perception-prior samples in the Lautum estimate (M).
    pub lautum_outer: usize,
    /// Memory-prior samples in the Lautum estimate (N).
    pub lautum_inner: usize,
    /// Samples per constraint (G).
    pub constraint_samples: usize,
    /// Modalities sub-sampled for information gain.
    pub info_subset: usize,
    /// Modalities sub-sampled for constraints.
    pub constraint_subset: usize,
    /// Guide samples drawn for the returned plan.
    pub action_samples: usize,
    /// Minimum clearance (m).
    pub d_min: f64,
    /// Samples in the progress estimate; the planner uses one.
    pub progress_samples: usize,
    pub progress_sign: ProgressSign,
    /// Lower clamp on the attention pseudo-probability.
    pub attention_floor: f64,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        Self {
            sigma_p: 0.02,
            sigma_i: 0.05,
            sigma_c: 20.0,
            lambda_p_min: 0.6,
            past_states: 5,
            plan_horizon: 3,
            past_capacity: 40,
            lautum_outer: 16,
            lautum_inner: 16,
            constraint_samples: 16,
            info_subset: 24,
            constraint_subset: 24,
            action_samples: 30,
            d_min: 0.25,
            progress_samples: 1,
            progress_sign: ProgressSign::PredMinusPast,
            attention_floor: 1e-6,
        }
    }
}

impl DecisionConfig {
    pub fn validate(&self) -> Result<(), IdiomError> {
        let positive = [
            (self.sigma_p, "planner.sigma_p"),
            (self.sigma_i, "planner.sigma_i"),
            (self.sigma_c, "planner.sigma_c"),
        ];
        for (v, field) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(IdiomError::InvalidConfig(field));
            }
        }
        if !(self.lambda_p_min > 0.0 && self.lambda_p_min <= 1.0) {
            return Err(IdiomError::InvalidConfig("planner.lambda_p_min"));
        }
        let counts = [
            (self.past_states, "planner.past_states"),
            (self.plan_horizon, "planner.plan_horizon"),
            (self.past_capacity, "planner.past_capacity"),
            (self.lautum_outer, "planner.lautum_outer"),
            (self.lautum_inner, "planner.lautum_inner"),
            (self.constraint_samples, "planner.constraint_samples"),
            (self.info_subset, "planner.info_subset"),
            (self.constraint_subset, "planner.constraint_subset"),
            (self.action_samples, "planner.action_samples"),
            (self.progress_samples, "planner.progress_samples"),
        ];
        for (v, field) in counts {
            if v == 0 {
                return Err(IdiomError::InvalidConfig(field));
            }
        }
        if self.past_states < 2 {
            return Err(IdiomError::InvalidConfig("planner.past_states"));
        }
        if self.past_states > self.past_capacity {
            return Err(IdiomError::InvalidConfig("planner.past_states"));
        }
        if !(self.d_min >= 0.0 && self.d_min.is_finite()) {
            return Err(IdiomError::InvalidConfig("planner.d_min"));
        }
        if !(self.attention_floor > 0.0 && self.attention_floor < 1.0) {
            return Err(IdiomError::InvalidConfig("planner.attention_floor"));
        }
        Ok(())
    }
}
