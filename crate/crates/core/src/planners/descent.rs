//! Steepest descent with central finite-difference gradients.
//!
//! Each iteration spends `2d` evaluations on the gradient, then tries a step
//! of fixed length along the negative gradient. A step that does not improve
//! is halved and retried from the same point.

use rand_chacha::ChaCha8Rng;

use super::{clip_unit, uniform_point, History, Hyper, Strategy};
use crate::error::Result;

pub(crate) const DEFAULT_STEP: f64 = 0.1;
pub(crate) const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone)]
enum Phase {
    Start,
    /// Probing `x ± h e_i`; `k` counts probes done so far.
    Gradient { k: usize, probes: Vec<(f64, f64)> },
    Trial { direction: Vec<f64>, candidate: Vec<f64> },
}

pub(crate) struct SteepestDescent {
    dim: usize,
    step: f64,
    fd_step: f64,
    current: Option<(Vec<f64>, f64)>,
    phase: Phase,
}

impl SteepestDescent {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        Ok(SteepestDescent {
            dim,
            step: hyper.positive("step", DEFAULT_STEP)?,
            fd_step: hyper.positive("fd_step", DEFAULT_FD_STEP)?,
            current: None,
            phase: Phase::Start,
        })
    }

    fn probe(&self, k: usize) -> Vec<f64> {
        let (x, _) = self.current.as_ref().expect("probing requires a current point");
        let mut p = x.clone();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        p[k / 2] += sign * self.fd_step;
        clip_unit(&mut p);
        p
    }

    fn trial_point(&self, direction: &[f64]) -> Vec<f64> {
        let (x, _) = self.current.as_ref().expect("trial requires a current point");
        let mut p: Vec<f64> = x.iter().zip(direction).map(|(a, d)| a - self.step * d).collect();
        clip_unit(&mut p);
        p
    }
}

impl Strategy for SteepestDescent {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        Ok(match &self.phase {
            Phase::Start => uniform_point(rng, self.dim),
            Phase::Gradient { k, .. } => self.probe(*k),
            Phase::Trial { candidate, .. } => candidate.clone(),
        })
    }

    fn observe(&mut self, u: &[f64], merit: f64, solicited: bool, _: &History) {
        if !solicited {
            return;
        }
        self.phase = match std::mem::replace(&mut self.phase, Phase::Start) {
            Phase::Start => {
                self.current = Some((u.to_vec(), merit));
                Phase::Gradient { k: 0, probes: Vec::new() }
            }
            Phase::Gradient { k, mut probes } => {
                probes.push((u[k / 2], merit));
                if k + 1 < 2 * self.dim {
                    Phase::Gradient { k: k + 1, probes }
                } else {
                    let grad: Vec<f64> = probes
                        .chunks(2)
                        .map(|pair| {
                            let ((xp, fp), (xm, fm)) = (pair[0], pair[1]);
                            if xp > xm { (fp - fm) / (xp - xm) } else { 0.0 }
                        })
                        .collect();
                    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                    if norm > 0.0 && norm.is_finite() {
                        let direction: Vec<f64> = grad.iter().map(|g| g / norm).collect();
                        let candidate = self.trial_point(&direction);
                        Phase::Trial { direction, candidate }
                    } else {
                        // Flat to finite-difference resolution: probe again.
                        Phase::Gradient { k: 0, probes: Vec::new() }
                    }
                }
            }
            Phase::Trial { direction, .. } => {
                let improved = self.current.as_ref().is_some_and(|(_, f)| merit < *f);
                if improved {
                    self.current = Some((u.to_vec(), merit));
                    Phase::Gradient { k: 0, probes: Vec::new() }
                } else {
                    self.step *= 0.5;
                    let candidate = self.trial_point(&direction);
                    Phase::Trial { direction, candidate }
                }
            }
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{Surface, SurfaceKind, SurfaceSpec};
    use rand::SeedableRng;
    use std::collections::BTreeMap;

    #[test]
    fn accepted_steps_strictly_decrease_on_convex_bowl() {
        let surface = Surface::new(SurfaceSpec::new(SurfaceKind::HyperEllipsoid, 2)).unwrap();
        let hyper = Hyper::validate("SteepestDescent", &["step", "fd_step"], &BTreeMap::new()).unwrap();
        for seed in 0..5 {
            let mut s = SteepestDescent::new(2, &hyper).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let history = History::default();
            let mut accepted = Vec::new();
            for _ in 0..2000 {
                let u = s.propose(&mut rng, &history).unwrap();
                s.observe(&u, surface.value(&u).unwrap(), true, &history);
                let f = s.current.as_ref().unwrap().1;
                if accepted.last() != Some(&f) {
                    accepted.push(f);
                }
                if accepted.len() > 10 {
                    break;
                }
            }
            assert!(accepted.len() > 10, "seed {seed}: only {} accepted", accepted.len());
            assert!(accepted.windows(2).all(|w| w[1] < w[0]), "seed {seed}: {accepted:?}");
        }
    }
}
