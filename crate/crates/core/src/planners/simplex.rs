//! Nelder–Mead downhill simplex as an ask/tell state machine.

use rand_chacha::ChaCha8Rng;

use super::{clip_unit, uniform_point, History, Hyper, Strategy};
use crate::error::Result;

pub(crate) const DEFAULT_STEP: f64 = 0.1;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone)]
enum Phase {
    /// Evaluating the initial vertices.
    Init(usize),
    Reflect,
    Expand { reflected: (Vec<f64>, f64) },
    Contract { outside: bool, reflected: (Vec<f64>, f64) },
    /// Re-evaluating every vertex but the best after a shrink.
    Shrink(usize),
}

/// Nelder–Mead core shared by the simplex and basin-hopping planners.
#[derive(Debug, Clone)]
pub(crate) struct NelderMead {
    dim: usize,
    start: Vec<Vec<f64>>,
    vertices: Vec<(Vec<f64>, f64)>,
    phase: Phase,
}

impl NelderMead {
    pub(crate) fn new(origin: &[f64], step: f64) -> Self {
        let dim = origin.len();
        let mut start = vec![origin.to_vec()];
        for i in 0..dim {
            let mut v = origin.to_vec();
            v[i] = if v[i] + step <= 1.0 { v[i] + step } else { v[i] - step };
            start.push(v);
        }
        NelderMead {
            dim,
            start,
            vertices: Vec::with_capacity(dim + 1),
            phase: Phase::Init(0),
        }
    }

    fn sort(&mut self) {
        // Stable: equal merits keep their older position.
        self.vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
    }

    fn centroid(&self) -> Vec<f64> {
        let n = self.dim as f64;
        let mut c = vec![0.0; self.dim];
        for (v, _) in &self.vertices[..self.dim] {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi / n;
            }
        }
        c
    }

    fn toward(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
        let mut p: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
        clip_unit(&mut p);
        p
    }

    pub(crate) fn propose(&mut self) -> Vec<f64> {
        match &self.phase {
            Phase::Init(i) => self.start[*i].clone(),
            Phase::Reflect => {
                self.sort();
                let c = self.centroid();
                Self::toward(&c, &self.vertices[self.dim].0, -REFLECT)
            }
            Phase::Expand { reflected } => Self::toward(&self.centroid(), &reflected.0, EXPAND),
            Phase::Contract { outside, reflected } => {
                let c = self.centroid();
                if *outside {
                    Self::toward(&c, &reflected.0, CONTRACT)
                } else {
                    Self::toward(&c, &self.vertices[self.dim].0, CONTRACT)
                }
            }
            Phase::Shrink(i) => Self::toward(&self.vertices[0].0, &self.vertices[*i].0, SHRINK),
        }
    }

    pub(crate) fn observe(&mut self, u: &[f64], f: f64) {
        let worst = self.dim;
        let point = (u.to_vec(), f);
        self.phase = match std::mem::replace(&mut self.phase, Phase::Reflect) {
            Phase::Init(i) => {
                self.vertices.push(point);
                if i + 1 < self.start.len() {
                    Phase::Init(i + 1)
                } else {
                    Phase::Reflect
                }
            }
            Phase::Reflect => {
                let best = self.vertices[0].1;
                let second_worst = self.vertices[worst - 1].1;
                if f < best {
                    Phase::Expand { reflected: point }
                } else if f < second_worst {
                    self.vertices[worst] = point;
                    Phase::Reflect
                } else {
                    Phase::Contract {
                        outside: f < self.vertices[worst].1,
                        reflected: point,
                    }
                }
            }
            Phase::Expand { reflected } => {
                self.vertices[worst] = if f < reflected.1 { point } else { reflected };
                Phase::Reflect
            }
            Phase::Contract { outside, reflected } => {
                let accept = if outside { f <= reflected.1 } else { f < self.vertices[worst].1 };
                if accept {
                    self.vertices[worst] = point;
                    Phase::Reflect
                } else if self.dim == 0 {
                    Phase::Reflect
                } else {
                    Phase::Shrink(1)
                }
            }
            Phase::Shrink(i) => {
                self.vertices[i] = point;
                if i < worst {
                    Phase::Shrink(i + 1)
                } else {
                    Phase::Reflect
                }
            }
        };
    }

    pub(crate) fn best(&self) -> Option<&(Vec<f64>, f64)> {
        self.vertices.iter().min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Single-start Nelder–Mead from a uniform random vertex; no restarts.
pub(crate) struct SimplexPlanner {
    dim: usize,
    step: f64,
    engine: Option<NelderMead>,
}

impl SimplexPlanner {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        Ok(SimplexPlanner {
            dim,
            step: hyper.positive("step", DEFAULT_STEP)?,
            engine: None,
        })
    }
}

impl Strategy for SimplexPlanner {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        let (dim, step) = (self.dim, self.step);
        let engine = self
            .engine
            .get_or_insert_with(|| NelderMead::new(&uniform_point(rng, dim), step));
        Ok(engine.propose())
    }

    fn observe(&mut self, u: &[f64], merit: f64, solicited: bool, _: &History) {
        if let (Some(engine), true) = (self.engine.as_mut(), solicited) {
            engine.observe(u, merit);
        }
    }
}
