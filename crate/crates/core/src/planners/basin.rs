//! Basin hopping: short Nelder–Mead descents joined by Gaussian jumps, with
//! Metropolis acceptance of each descent's end point.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::simplex::NelderMead;
use super::{clip_unit, uniform_point, History, Hyper, Strategy};
use crate::error::{Error, Result};

pub(crate) const DEFAULT_PERTURBATION: f64 = 0.1;
pub(crate) const DEFAULT_TEMPERATURE: f64 = 1.0;

const LOCAL_STEP: f64 = 0.05;

pub(crate) struct BasinHopping {
    dim: usize,
    jump: Normal<f64>,
    temperature: f64,
    local_evals: usize,
    local: Option<NelderMead>,
    spent: usize,
    accepted: Option<(Vec<f64>, f64)>,
}

impl BasinHopping {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        let step = hyper.positive("step", DEFAULT_PERTURBATION)?;
        Ok(BasinHopping {
            dim,
            jump: Normal::new(0.0, step).map_err(|e| Error::Config(e.to_string()))?,
            temperature: hyper.positive("temperature", DEFAULT_TEMPERATURE)?,
            local_evals: hyper.count("local_evals", 10 * (dim + 1), dim + 2)?,
            local: None,
            spent: 0,
            accepted: None,
        })
    }

    /// Closes the finished descent and starts the next one from a jump.
    fn hop(&mut self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let finished = self.local.take().and_then(|nm| nm.best().cloned());
        if let Some((x, f)) = finished {
            let take = match &self.accepted {
                None => true,
                Some((_, current)) => {
                    f <= *current || rng.random::<f64>() < (-(f - current) / self.temperature).exp()
                }
            };
            if take {
                self.accepted = Some((x, f));
            }
        }
        let base = &self.accepted.as_ref().expect("a descent has finished").0;
        let mut start: Vec<f64> = base.iter().map(|v| v + self.jump.sample(rng)).collect();
        clip_unit(&mut start);
        start
    }
}

impl Strategy for BasinHopping {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        if self.local.is_none() || self.spent >= self.local_evals {
            let start = if self.local.is_none() {
                uniform_point(rng, self.dim)
            } else {
                self.hop(rng)
            };
            self.local = Some(NelderMead::new(&start, LOCAL_STEP));
            self.spent = 0;
        }
        Ok(self.local.as_mut().expect("descent in progress").propose())
    }

    fn observe(&mut self, u: &[f64], merit: f64, solicited: bool, _: &History) {
        if let (Some(local), true) = (self.local.as_mut(), solicited) {
            local.observe(u, merit);
            self.spent += 1;
        }
    }
}
