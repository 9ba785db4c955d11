use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::SviError;
use crate::prob::{logistic, softplus, softplus_inverse};

#[derive(Clone, Debug, PartialEq)]
struct Param {
    raw: Vec<f64>,
    positive: bool,
}

/// Named real-vector parameters. Positive parameters are stored
/// unconstrained and exposed through `softplus(raw) = log(1 + e^raw)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore {
    entries: BTreeMap<String, Param>,
}

/// Gradients keyed by parameter name, in unconstrained (raw) coordinates.
pub type ParamGrads = BTreeMap<String, Vec<f64>>;

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces `name` with the given exposed values.
    pub fn insert(&mut self, name: &str, values: Vec<f64>, positive: bool) -> Result<(), SviError> {
        if values.iter().any(|v| !v.is_finite()) || (positive && values.iter().any(|&v| v <= 0.0)) {
            return Err(SviError::InvalidParam(name.to_string()));
        }
        let raw = if positive {
            values.iter().map(|&v| softplus_inverse(v)).collect()
        } else {
            values
        };
        self.entries.insert(name.to_string(), Param { raw, positive });
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Exposed (constrained) values.
    pub fn get(&self, name: &str) -> Option<Vec<f64>> {
        self.entries.get(name).map(|p| {
            if p.positive {
                p.raw.iter().map(|&r| softplus(r)).collect()
            } else {
                p.raw.clone()
            }
        })
    }

    pub fn raw(&self, name: &str) -> Option<&[f64]> {
        self.entries.get(name).map(|p| p.raw.as_slice())
    }

    pub(crate) fn raw_mut(&mut self, name: &str) -> Option<&mut Vec<f64>> {
        self.entries.get_mut(name).map(|p| &mut p.raw)
    }

    pub fn is_positive(&self, name: &str) -> Option<bool> {
        self.entries.get(name).map(|p| p.positive)
    }

    /// d(exposed)/d(raw) for component `k`.
    pub(crate) fn jacobian(&self, name: &str, k: usize) -> f64 {
        match self.entries.get(name) {
            Some(p) if p.positive => logistic(p.raw[k]),
            _ => 1.0,
        }
    }
}
