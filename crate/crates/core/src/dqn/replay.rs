use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fixed-capacity ring buffer; once full, each push evicts the oldest item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayBuffer<T> {
    capacity: usize,
    items: Vec<T>,
    cursor: usize,
}

impl<T> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidConfig("replay capacity must be >= 1".into()));
        }
        Ok(ReplayBuffer {
            capacity,
            items: Vec::with_capacity(capacity.min(1 << 16)),
            cursor: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Stores `item`, returning the evicted one when the buffer was full.
    pub fn push(&mut self, item: T) -> Option<T> {
        if self.items.len() < self.capacity {
            self.items.push(item);
            None
        } else {
            let old = std::mem::replace(&mut self.items[self.cursor], item);
            self.cursor = (self.cursor + 1) % self.capacity;
            Some(old)
        }
    }

    /// Items from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        let (newer, older) = self.items.split_at(self.cursor);
        older.iter().chain(newer)
    }

    /// `batch_size` items drawn uniformly with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, batch_size: usize, rng: &mut R) -> Result<Vec<&T>> {
        if self.items.is_empty() {
            return Err(Error::Empty);
        }
        Ok((0..batch_size)
            .map(|_| &self.items[rng.random_range(0..self.items.len())])
            .collect())
    }
}
