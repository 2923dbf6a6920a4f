use rand_chacha::ChaCha8Rng;

use super::{ceil_root, History, Hyper, Strategy};
use crate::error::{Error, Result};

const DEFAULT_LEVELS: usize = 5;

/// Full factorial grid visited in lexicographic order (last axis fastest).
pub(crate) struct GridSearch {
    dim: usize,
    levels: usize,
    explicit: bool,
    cursor: usize,
}

impl GridSearch {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        let explicit = hyper.get("levels").is_some();
        Ok(GridSearch {
            dim,
            levels: hyper.count("levels", DEFAULT_LEVELS, 1)?,
            explicit,
            cursor: 0,
        })
    }

    fn total(&self) -> usize {
        self.levels.checked_pow(self.dim as u32).unwrap_or(usize::MAX)
    }

    fn coordinate(&self, index: usize) -> f64 {
        if self.levels == 1 {
            0.5
        } else {
            index as f64 / (self.levels - 1) as f64
        }
    }
}

impl Strategy for GridSearch {
    fn propose(&mut self, _: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        if self.cursor >= self.total() {
            return Err(Error::PlanExhausted(self.cursor));
        }
        let mut rest = self.cursor;
        let mut u = vec![0.0; self.dim];
        for slot in u.iter_mut().rev() {
            *slot = self.coordinate(rest % self.levels);
            rest /= self.levels;
        }
        self.cursor += 1;
        Ok(u)
    }

    fn observe(&mut self, _: &[f64], _: f64, _: bool, _: &History) {}

    fn budget_hint(&mut self, budget: usize) {
        if !self.explicit {
            self.levels = ceil_root(budget, self.dim).max(1);
        }
    }
}
