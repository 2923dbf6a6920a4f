//! Particle swarm with asynchronous updates: each particle moves as soon as
//! its previous position has been evaluated.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{uniform_point, History, Hyper, Strategy};
use crate::error::Result;

pub(crate) const DEFAULT_INERTIA: f64 = 0.7;
pub(crate) const DEFAULT_ACCEL: f64 = 1.4;

const MAX_VELOCITY: f64 = 0.2;

struct Particle {
    position: Vec<f64>,
    velocity: Vec<f64>,
    best: (Vec<f64>, f64),
}

pub(crate) struct ParticleSwarm {
    dim: usize,
    size: usize,
    inertia: f64,
    cognitive: f64,
    social: f64,
    particles: Vec<Particle>,
    global: Option<(Vec<f64>, f64)>,
    current: usize,
    /// Position proposed for `current`, with the velocity that produced it.
    pending: Option<(Vec<f64>, Vec<f64>)>,
}

impl ParticleSwarm {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        Ok(ParticleSwarm {
            dim,
            size: hyper.count("swarm", 10, 2)?,
            inertia: hyper.or("inertia", DEFAULT_INERTIA),
            cognitive: hyper.or("cognitive", DEFAULT_ACCEL),
            social: hyper.or("social", DEFAULT_ACCEL),
            particles: Vec::new(),
            global: None,
            current: 0,
            pending: None,
        })
    }

    fn step(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        let p = &self.particles[self.current];
        let g = &self.global.as_ref().expect("swarm initialized").0;
        let mut position = Vec::with_capacity(self.dim);
        let mut velocity = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let (r1, r2): (f64, f64) = (rng.random(), rng.random());
            let mut v = self.inertia * p.velocity[j]
                + self.cognitive * r1 * (p.best.0[j] - p.position[j])
                + self.social * r2 * (g[j] - p.position[j]);
            v = v.clamp(-MAX_VELOCITY, MAX_VELOCITY);
            let mut x = p.position[j] + v;
            if !(0.0..=1.0).contains(&x) {
                x = x.clamp(0.0, 1.0);
                v = 0.0;
            }
            position.push(x);
            velocity.push(v);
        }
        (position, velocity)
    }
}

impl Strategy for ParticleSwarm {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        if self.particles.len() < self.size {
            return Ok(uniform_point(rng, self.dim));
        }
        if self.pending.is_none() {
            self.pending = Some(self.step(rng));
        }
        Ok(self.pending.as_ref().map(|(x, _)| x.clone()).unwrap_or_default())
    }

    fn observe(&mut self, u: &[f64], merit: f64, solicited: bool, _: &History) {
        if !solicited {
            return;
        }
        if self.global.as_ref().is_none_or(|(_, g)| merit < *g) {
            self.global = Some((u.to_vec(), merit));
        }
        if self.particles.len() < self.size {
            self.particles.push(Particle {
                position: u.to_vec(),
                velocity: vec![0.0; self.dim],
                best: (u.to_vec(), merit),
            });
            return;
        }
        if let Some((_, velocity)) = self.pending.take() {
            let p = &mut self.particles[self.current];
            p.position = u.to_vec();
            p.velocity = velocity;
            if merit < p.best.1 {
                p.best = (u.to_vec(), merit);
            }
        }
        self.current = (self.current + 1) % self.size;
    }
}
