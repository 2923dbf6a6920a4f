//! Differential evolution, rand/1/bin with immediate replacement.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{clip_unit, uniform_point, History, Hyper, Strategy};
use crate::error::Result;

pub(crate) const DEFAULT_F: f64 = 0.8;
pub(crate) const DEFAULT_CR: f64 = 0.9;

pub(crate) struct DifferentialEvolution {
    dim: usize,
    popsize: usize,
    f: f64,
    cr: f64,
    population: Vec<(Vec<f64>, f64)>,
    /// Index of the member the pending trial competes against.
    target: usize,
}

impl DifferentialEvolution {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        let cr = hyper.or("cr", DEFAULT_CR);
        if !(0.0..=1.0).contains(&cr) {
            return Err(crate::error::Error::Config(format!("`cr` must lie in [0, 1], got {cr}")));
        }
        Ok(DifferentialEvolution {
            dim,
            popsize: hyper.count("popsize", (4 * dim).max(8), 4)?,
            f: hyper.positive("f", DEFAULT_F)?,
            cr,
            population: Vec::new(),
            target: 0,
        })
    }

    fn trial(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.popsize;
        let mut pick = |exclude: &[usize]| loop {
            let k = rng.random_range(0..n);
            if !exclude.contains(&k) {
                return k;
            }
        };
        let a = pick(&[self.target]);
        let b = pick(&[self.target, a]);
        let c = pick(&[self.target, a, b]);
        let forced = rng.random_range(0..self.dim);
        let base = &self.population[self.target].0;
        let (xa, xb, xc) = (&self.population[a].0, &self.population[b].0, &self.population[c].0);
        let mut u: Vec<f64> = (0..self.dim)
            .map(|j| {
                if j == forced || rng.random::<f64>() < self.cr {
                    xa[j] + self.f * (xb[j] - xc[j])
                } else {
                    base[j]
                }
            })
            .collect();
        clip_unit(&mut u);
        u
    }
}

impl Strategy for DifferentialEvolution {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        if self.population.len() < self.popsize {
            return Ok(uniform_point(rng, self.dim));
        }
        Ok(self.trial(rng))
    }

    fn observe(&mut self, u: &[f64], merit: f64, solicited: bool, _: &History) {
        if !solicited {
            return;
        }
        if self.population.len() < self.popsize {
            self.population.push((u.to_vec(), merit));
            return;
        }
        if merit <= self.population[self.target].1 {
            self.population[self.target] = (u.to_vec(), merit);
        }
        self.target = (self.target + 1) % self.popsize;
    }
}
