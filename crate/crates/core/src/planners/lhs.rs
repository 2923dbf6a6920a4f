use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{History, Hyper, Strategy};
use crate::error::Result;

const DEFAULT_SAMPLES: usize = 10;

/// Latin hypercube batches: each batch of `n` points puts exactly one point
/// in each of the `n` strata of every axis. A fresh batch starts when one runs out.
pub(crate) struct LatinHypercube {
    dim: usize,
    samples: usize,
    explicit: bool,
    batch: Vec<Vec<f64>>,
}

impl LatinHypercube {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        Ok(LatinHypercube {
            dim,
            samples: hyper.count("samples", DEFAULT_SAMPLES, 1)?,
            explicit: hyper.get("samples").is_some(),
            batch: Vec::new(),
        })
    }

    fn refill(&mut self, rng: &mut ChaCha8Rng) {
        let n = self.samples;
        let strata: Vec<Vec<usize>> = (0..self.dim)
            .map(|_| {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(rng);
                perm
            })
            .collect();
        // Reversed so that `pop` yields points in generation order.
        self.batch = (0..n)
            .map(|j| {
                strata
                    .iter()
                    .map(|perm| (perm[j] as f64 + rng.random::<f64>()) / n as f64)
                    .collect()
            })
            .collect();
        self.batch.reverse();
    }
}

impl Strategy for LatinHypercube {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        if self.batch.is_empty() {
            self.refill(rng);
        }
        Ok(self.batch.pop().expect("refilled batch is non-empty"))
    }

    fn observe(&mut self, _: &[f64], _: f64, _: bool, _: &History) {}

    fn budget_hint(&mut self, budget: usize) {
        if !self.explicit {
            self.samples = budget.max(1);
        }
    }
}
