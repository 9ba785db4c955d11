use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::IdiomError;
use crate::prob::Distribution;

/// Ring buffer of past state marginals, oldest first.
#[derive(Clone, Debug, PartialEq)]
pub struct PastStateBuffer {
    capacity: usize,
    entries: VecDeque<(u64, Distribution)>,
}

impl PastStateBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "buffer capacity must be positive");
        Self { capacity, entries: VecDeque::with_capacity(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends a marginal, evicting the oldest entry when full. Timesteps
    /// must strictly increase.
    pub fn push(&mut self, timestep: u64, marginal: Distribution) -> Result<(), IdiomError> {
        marginal.validate()?;
        if let Some((last, _)) = self.entries.back() {
            if timestep <= *last {
                return Err(IdiomError::NonIncreasingTimestep { last: *last, got: timestep });
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((timestep, marginal));
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &(u64, Distribution)> {
        self.entries.iter()
    }

    pub fn latest(&self) -> Option<&(u64, Distribution)> {
        self.entries.back()
    }

    /// `count` entries, newest first, spaced `floor(len / count)` apart so
    /// the window reaches back across the whole buffer. Returns fewer when
    /// the buffer holds fewer than `count` entries.
    pub fn window(&self, count: usize) -> Vec<&Distribution> {
        let len = self.entries.len();
        if len == 0 || count == 0 {
            return Vec::new();
        }
        let take = count.min(len);
        let stride = (len / take).max(1);
        (0..take).map(|l| &self.entries[len - 1 - l * stride].1).collect()
    }
}
