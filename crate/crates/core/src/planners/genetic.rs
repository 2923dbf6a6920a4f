//! Generational genetic algorithm: binary tournaments, blend crossover,
//! per-gene Gaussian mutation and a single elite carried over unevaluated.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{clip_unit, uniform_point, History, Hyper, Strategy};
use crate::error::{Error, Result};

pub(crate) const DEFAULT_MUTATION_SIGMA: f64 = 0.1;
pub(crate) const DEFAULT_BLEND_ALPHA: f64 = 0.5;

pub(crate) struct Genetic {
    dim: usize,
    popsize: usize,
    mutation_rate: f64,
    mutation: Normal<f64>,
    alpha: f64,
    population: Vec<(Vec<f64>, f64)>,
    offspring: Vec<(Vec<f64>, f64)>,
}

impl Genetic {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        let mutation_rate = hyper.or("mutation_rate", 1.0 / dim as f64);
        if !(0.0..=1.0).contains(&mutation_rate) {
            return Err(Error::Config(format!(
                "`mutation_rate` must lie in [0, 1], got {mutation_rate}"
            )));
        }
        let sigma = hyper.positive("mutation_sigma", DEFAULT_MUTATION_SIGMA)?;
        let alpha = hyper.or("blend_alpha", DEFAULT_BLEND_ALPHA);
        if alpha < 0.0 {
            return Err(Error::Config(format!("`blend_alpha` must be >= 0, got {alpha}")));
        }
        Ok(Genetic {
            dim,
            popsize: hyper.count("popsize", (5 * dim).max(10), 2)?,
            mutation_rate,
            mutation: Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?,
            alpha,
            population: Vec::new(),
            offspring: Vec::new(),
        })
    }

    fn tournament(&self, rng: &mut ChaCha8Rng) -> usize {
        let a = rng.random_range(0..self.population.len());
        let b = rng.random_range(0..self.population.len());
        if self.population[b].1 < self.population[a].1 { b } else { a }
    }

    fn child(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let pa = &self.population[self.tournament(rng)].0;
        let pb = &self.population[self.tournament(rng)].0;
        let mut c: Vec<f64> = pa
            .iter()
            .zip(pb)
            .map(|(a, b)| {
                let (lo, hi) = (a.min(*b), a.max(*b));
                let spread = self.alpha * (hi - lo);
                let mut g = lo - spread + rng.random::<f64>() * (hi - lo + 2.0 * spread);
                if rng.random::<f64>() < self.mutation_rate {
                    g += self.mutation.sample(rng);
                }
                g
            })
            .collect();
        clip_unit(&mut c);
        c
    }
}

impl Strategy for Genetic {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        if self.population.len() < self.popsize {
            return Ok(uniform_point(rng, self.dim));
        }
        Ok(self.child(rng))
    }

    fn observe(&mut self, u: &[f64], merit: f64, solicited: bool, _: &History) {
        if !solicited {
            return;
        }
        if self.population.len() < self.popsize {
            self.population.push((u.to_vec(), merit));
            return;
        }
        self.offspring.push((u.to_vec(), merit));
        if self.offspring.len() + 1 == self.popsize {
            let elite = self
                .population
                .iter()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .cloned()
                .expect("population is non-empty");
            let mut next = vec![elite];
            next.append(&mut self.offspring);
            self.population = next;
        }
    }
}
