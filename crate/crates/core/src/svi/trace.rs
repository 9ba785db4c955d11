use alloc::string::String;
use alloc::vec::Vec;

use crate::prob::Distribution;

/// One executed sample site.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub name: String,
    pub distribution: Distribution,
    pub value: Vec<f64>,
    pub observed: bool,
    pub log_prob: f64,
    /// Site declared with an identical distribution in both model and guide.
    /// Its log-prob terms cancel in the ELBO.
    pub shared: bool,
    /// Parameter-store entries whose concatenated exposed values form the
    /// distribution's flattened parameter vector. Empty for fixed sites.
    pub params: Vec<String>,
}

/// Ordered record of the sample sites from one program execution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    records: Vec<SampleRecord>,
    total_log_prob: f64,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, record: SampleRecord) {
        self.total_log_prob += record.log_prob;
        self.records.push(record);
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_log_prob(&self) -> f64 {
        self.total_log_prob
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.records.iter().position(|r| r.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&SampleRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn latent(&self) -> impl Iterator<Item = &SampleRecord> {
        self.records.iter().filter(|r| !r.observed)
    }
}
