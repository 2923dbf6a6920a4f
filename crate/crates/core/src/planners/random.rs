use rand_chacha::ChaCha8Rng;

use super::{uniform_point, History, Strategy};
use crate::error::Result;

/// Independent uniform draws; ignores all feedback.
pub(crate) struct RandomSearch {
    dim: usize,
}

impl RandomSearch {
    pub(crate) fn new(dim: usize) -> Self {
        RandomSearch { dim }
    }
}

impl Strategy for RandomSearch {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        Ok(uniform_point(rng, self.dim))
    }

    fn observe(&mut self, _: &[f64], _: f64, _: bool, _: &History) {}
}
