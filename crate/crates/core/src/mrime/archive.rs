use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{GaussianModel, WeightMode};

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub position: Vec<f64>,
    pub fitness: f64,
}

/// FIFO store of dominant-group members feeding the Gaussian model.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantArchive {
    entries: VecDeque<ArchiveEntry>,
    capacity: usize,
}

impl DominantArchive {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::config("archive capacity must be positive"));
        }
        Ok(Self {
            entries: VecDeque::with_capacity(capacity),
            capacity,
        })
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

    /// Entries oldest first.
    pub fn entries(&self) -> impl Iterator<Item = &ArchiveEntry> {
        self.entries.iter()
    }

    /// Append in order, evicting the oldest entries beyond capacity.
    pub fn update<I: IntoIterator<Item = ArchiveEntry>>(&mut self, new_members: I) {
        for e in new_members {
            if self.entries.len() == self.capacity {
                self.entries.pop_front();
            }
            self.entries.push_back(e);
        }
    }

    /// Gaussian fitted to the archive, members ranked by stored fitness
    /// (older entry first on ties).
    pub fn fit_model(&self, mode: WeightMode) -> Result<GaussianModel> {
        if self.entries.is_empty() {
            return Err(Error::Empty("cannot fit a model to an empty archive".into()));
        }
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| {
            self.entries[a]
                .fitness
                .total_cmp(&self.entries[b].fitness)
                .then(a.cmp(&b))
        });
        let members: Vec<&[f64]> = order.iter().map(|&i| self.entries[i].position.as_slice()).collect();
        GaussianModel::fit(&members, mode)
    }
}
