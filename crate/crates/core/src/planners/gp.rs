//! Gaussian-process Bayesian optimization with expected improvement.
//!
//! The surrogate is a zero-mean GP with a unit-variance squared-exponential
//! kernel on standardized merits. Its length-scale is the best of a fixed
//! geometric grid under the log marginal likelihood. The acquisition is
//! maximized over uniform random candidates plus two rings of local
//! candidates around the incumbent.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{clip_unit, uniform_point, History, Hyper, Strategy};
use crate::error::{Error, Result};

pub(crate) const DEFAULT_INIT_POINTS: usize = 5;
pub(crate) const DEFAULT_NUGGET: f64 = 1e-6;
pub(crate) const DEFAULT_CANDIDATES: usize = 1000;

const LENGTH_SCALES: usize = 10;
const MIN_LENGTH_SCALE: f64 = 0.03;
const MAX_LENGTH_SCALE: f64 = 3.0;
/// Past this many observations the length-scale is re-selected only every
/// `RESELECT_EVERY` observations.
const RESELECT_BELOW: usize = 40;
const RESELECT_EVERY: usize = 10;
const LOCAL_SIGMAS: [f64; 2] = [0.05, 0.005];
/// The surrogate is fit to at most this many observations, the best ones,
/// which keeps each proposal's cost bounded on long campaigns.
const MAX_MODEL_POINTS: usize = 200;

/// Complementary error function, fractional error below 1.2e-7 everywhere
/// (Chebyshev fit from Numerical Recipes).
pub(crate) fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98
                                + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77))))))));
    let r = t * poly.exp();
    if x >= 0.0 { r } else { 2.0 - r }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Expected improvement below `best` for a minimization problem.
pub(crate) fn expected_improvement(mean: f64, sd: f64, best: f64, xi: f64) -> f64 {
    let gain = best - mean - xi;
    if sd <= 0.0 {
        return gain.max(0.0);
    }
    let z = gain / sd;
    gain * normal_cdf(z) + sd * normal_pdf(z)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Observations the surrogate is fit to, in tell order.
fn model_points(history: &History) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut keep: Vec<usize> = (0..history.len()).collect();
    if keep.len() > MAX_MODEL_POINTS {
        keep.sort_by(|a, b| history.merits[*a].total_cmp(&history.merits[*b]));
        keep.truncate(MAX_MODEL_POINTS);
        keep.sort_unstable();
    }
    (
        keep.iter().map(|i| history.units[*i].clone()).collect(),
        keep.iter().map(|i| history.merits[*i]).collect(),
    )
}

struct Fit {
    length_scale: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    y_mean: f64,
    y_std: f64,
}

pub(crate) struct GpBayesOpt {
    dim: usize,
    init_points: usize,
    nugget: f64,
    xi: f64,
    candidates: usize,
    length_scale: Option<f64>,
    selected_at: usize,
}

impl GpBayesOpt {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        let xi = hyper.or("xi", 0.0);
        if xi < 0.0 {
            return Err(Error::Config(format!("`xi` must be >= 0, got {xi}")));
        }
        Ok(GpBayesOpt {
            dim,
            init_points: hyper.count("init_points", DEFAULT_INIT_POINTS, 1)?,
            nugget: hyper.positive("nugget", DEFAULT_NUGGET)?,
            xi,
            candidates: hyper.count("candidates", DEFAULT_CANDIDATES, 1)?,
            length_scale: None,
            selected_at: 0,
        })
    }

    fn kernel(units: &[Vec<f64>], length_scale: f64, nugget: f64) -> DMatrix<f64> {
        let n = units.len();
        let scale = -0.5 / (length_scale * length_scale);
        DMatrix::from_fn(n, n, |i, j| {
            let k = (scale * sq_dist(&units[i], &units[j])).exp();
            if i == j { k + nugget } else { k }
        })
    }

    /// Cholesky of the kernel matrix, inflating the nugget if needed.
    fn factor(&self, units: &[Vec<f64>], length_scale: f64) -> Option<Cholesky<f64, Dyn>> {
        let mut nugget = self.nugget;
        for _ in 0..6 {
            if let Some(chol) = Self::kernel(units, length_scale, nugget).cholesky() {
                return Some(chol);
            }
            nugget *= 10.0;
        }
        None
    }

    fn fit_with(&self, units: &[Vec<f64>], y: &DVector<f64>, length_scale: f64) -> Option<(f64, Cholesky<f64, Dyn>, DVector<f64>)> {
        let chol = self.factor(units, length_scale)?;
        let alpha = chol.solve(y);
        let log_det: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
        let lml = -0.5 * y.dot(&alpha) - log_det - 0.5 * y.len() as f64 * (2.0 * PI).ln();
        lml.is_finite().then_some((lml, chol, alpha))
    }

    fn fit(&mut self, units: &[Vec<f64>], merits: &[f64], observed: usize) -> Option<Fit> {
        let n = units.len() as f64;
        let y_mean = merits.iter().sum::<f64>() / n;
        let var = merits.iter().map(|m| (m - y_mean).powi(2)).sum::<f64>() / n;
        let y_std = if var > 0.0 { var.sqrt() } else { 1.0 };
        let y = DVector::from_iterator(units.len(), merits.iter().map(|m| (m - y_mean) / y_std));

        let reselect = self.length_scale.is_none()
            || observed < RESELECT_BELOW
            || observed >= self.selected_at + RESELECT_EVERY;
        let best = if reselect {
            let ratio = (MAX_LENGTH_SCALE / MIN_LENGTH_SCALE).powf(1.0 / (LENGTH_SCALES - 1) as f64);
            let mut best: Option<(f64, f64, Cholesky<f64, Dyn>, DVector<f64>)> = None;
            for k in 0..LENGTH_SCALES {
                let ls = MIN_LENGTH_SCALE * ratio.powi(k as i32);
                if let Some((lml, chol, alpha)) = self.fit_with(units, &y, ls) {
                    if best.as_ref().is_none_or(|b| lml > b.0) {
                        best = Some((lml, ls, chol, alpha));
                    }
                }
            }
            self.selected_at = observed;
            best.map(|(_, ls, chol, alpha)| (ls, chol, alpha))
        } else {
            let ls = self.length_scale.expect("checked above");
            self.fit_with(units, &y, ls).map(|(_, chol, alpha)| (ls, chol, alpha))
        };
        let (length_scale, chol, alpha) = best?;
        self.length_scale = Some(length_scale);
        Some(Fit {
            length_scale,
            chol,
            alpha,
            y_mean,
            y_std,
        })
    }

    fn candidates(&self, rng: &mut ChaCha8Rng, incumbent: &[f64]) -> Vec<Vec<f64>> {
        let local = self.candidates / 10;
        let mut out: Vec<Vec<f64>> = (0..self.candidates).map(|_| uniform_point(rng, self.dim)).collect();
        for sigma in LOCAL_SIGMAS {
            for _ in 0..local {
                let mut c: Vec<f64> = incumbent
                    .iter()
                    .map(|v| {
                        let z: f64 = StandardNormal.sample(rng);
                        v + sigma * z
                    })
                    .collect();
                clip_unit(&mut c);
                out.push(c);
            }
        }
        out
    }
}

impl Strategy for GpBayesOpt {
    fn propose(&mut self, rng: &mut ChaCha8Rng, history: &History) -> Result<Vec<f64>> {
        if history.len() < self.init_points {
            return Ok(uniform_point(rng, self.dim));
        }
        let (units, merits) = model_points(history);
        let Some(fit) = self.fit(&units, &merits, history.len()) else {
            log::debug!("GP fit failed; falling back to a uniform sample");
            return Ok(uniform_point(rng, self.dim));
        };
        let best_idx = history.best_index().expect("history is non-empty");
        let incumbent = &history.units[best_idx];
        let best = (history.merits[best_idx] - fit.y_mean) / fit.y_std;
        let candidates = self.candidates(rng, incumbent);

        let scale = -0.5 / (fit.length_scale * fit.length_scale);
        let cross = DMatrix::from_fn(units.len(), candidates.len(), |i, j| {
            (scale * sq_dist(&units[i], &candidates[j])).exp()
        });
        let means = cross.transpose() * &fit.alpha;
        let mut v = cross;
        fit.chol.l_dirty().solve_lower_triangular_mut(&mut v);

        let mut chosen = 0;
        let mut chosen_ei = f64::NEG_INFINITY;
        for (j, c) in v.column_iter().enumerate() {
            let var = (1.0 - c.norm_squared()).max(0.0);
            let ei = expected_improvement(means[j], var.sqrt(), best, self.xi);
            if ei > chosen_ei {
                chosen_ei = ei;
                chosen = j;
            }
        }
        Ok(candidates.into_iter().nth(chosen).expect("candidate index in range"))
    }

    fn observe(&mut self, _: &[f64], _: f64, _: bool, _: &History) {}
}
