//! CMA-ES with the standard rank-one plus rank-μ covariance update.
//!
//! The starting mean is evaluated once on its own; generations of λ samples
//! follow. Samples are clipped to the unit cube and the update uses the
//! clipped steps, so the search distribution never learns from points that
//! were not evaluated.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{clip_unit, uniform_point, History, Hyper, Strategy};
use crate::error::Result;

pub(crate) const DEFAULT_SIGMA0: f64 = 0.3;

const MIN_EIGENVALUE: f64 = 1e-20;
const MIN_SIGMA: f64 = 1e-12;

struct Params {
    lambda: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    cc: f64,
    cs: f64,
    c1: f64,
    cmu: f64,
    damps: f64,
    chi_n: f64,
}

impl Params {
    fn new(n: usize, lambda: usize) -> Self {
        let nf = n as f64;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let cc = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let cs = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let c1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let cmu = (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
        let damps = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        Params {
            lambda,
            weights,
            mu_eff,
            cc,
            cs,
            c1,
            cmu,
            damps,
            chi_n,
        }
    }
}

struct State {
    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    /// Eigenbasis `B` and axis lengths `D` of `cov`.
    basis: DMatrix<f64>,
    scales: DVector<f64>,
    pc: DVector<f64>,
    ps: DVector<f64>,
    generation: u32,
    /// Clipped steps `(x - m) / σ` and merits of the current generation.
    evaluated: Vec<(DVector<f64>, f64)>,
}

pub(crate) struct CmaEs {
    dim: usize,
    sigma0: f64,
    params: Params,
    state: Option<State>,
}

impl CmaEs {
    pub(crate) fn new(dim: usize, hyper: &Hyper) -> Result<Self> {
        let default_lambda = 4 + (3.0 * (dim as f64).ln()).floor() as usize;
        let lambda = hyper.count("popsize", default_lambda, 2)?;
        Ok(CmaEs {
            dim,
            sigma0: hyper.positive("sigma0", DEFAULT_SIGMA0)?,
            params: Params::new(dim, lambda),
            state: None,
        })
    }

    fn refresh_eigen(state: &mut State) {
        let n = state.cov.nrows();
        let sym = (&state.cov + state.cov.transpose()) * 0.5;
        if !sym.iter().all(|v| v.is_finite()) {
            state.cov = DMatrix::identity(n, n);
            state.basis = DMatrix::identity(n, n);
            state.scales = DVector::from_element(n, 1.0);
            return;
        }
        let eig = SymmetricEigen::new(sym.clone());
        state.cov = sym;
        state.basis = eig.eigenvectors;
        state.scales = eig.eigenvalues.map(|v| v.max(MIN_EIGENVALUE).sqrt());
    }

    fn update(&mut self) {
        let p = &self.params;
        let n = self.dim as f64;
        let state = self.state.as_mut().expect("update requires a state");
        let mut evaluated = std::mem::take(&mut state.evaluated);
        evaluated.sort_by(|a, b| a.1.total_cmp(&b.1));

        let mut y_w = DVector::zeros(self.dim);
        for ((y, _), w) in evaluated.iter().zip(&p.weights) {
            y_w += y * *w;
        }
        state.mean += &y_w * state.sigma;
        for v in state.mean.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }

        // C^{-1/2} y_w = B D^{-1} Bᵀ y_w
        let inv_sqrt_y = &state.basis * (state.basis.transpose() * &y_w).component_div(&state.scales);
        state.ps = &state.ps * (1.0 - p.cs) + inv_sqrt_y * (p.cs * (2.0 - p.cs) * p.mu_eff).sqrt();
        state.generation += 1;
        let ps_norm = state.ps.norm();
        let decay = 1.0 - (1.0 - p.cs).powi(2 * state.generation as i32);
        let hsig = ps_norm / decay.sqrt() / p.chi_n < 1.4 + 2.0 / (n + 1.0);
        let h = if hsig { 1.0 } else { 0.0 };
        state.pc = &state.pc * (1.0 - p.cc) + &y_w * (h * (p.cc * (2.0 - p.cc) * p.mu_eff).sqrt());

        let mut rank_mu = DMatrix::zeros(self.dim, self.dim);
        for ((y, _), w) in evaluated.iter().zip(&p.weights) {
            rank_mu += y * y.transpose() * *w;
        }
        let rank_one = &state.pc * state.pc.transpose()
            + &state.cov * ((1.0 - h) * p.cc * (2.0 - p.cc));
        state.cov = &state.cov * (1.0 - p.c1 - p.cmu) + rank_one * p.c1 + rank_mu * p.cmu;

        state.sigma *= ((p.cs / p.damps) * (ps_norm / p.chi_n - 1.0)).exp();
        state.sigma = state.sigma.clamp(MIN_SIGMA, 1.0);
        Self::refresh_eigen(state);
    }
}

impl Strategy for CmaEs {
    fn propose(&mut self, rng: &mut ChaCha8Rng, _: &History) -> Result<Vec<f64>> {
        let Some(state) = &self.state else {
            return Ok(uniform_point(rng, self.dim));
        };
        let z = DVector::from_iterator(self.dim, (0..self.dim).map(|_| StandardNormal.sample(rng)));
        let y = &state.basis * z.component_mul(&state.scales);
        let mut x: Vec<f64> = (&state.mean + y * state.sigma).iter().copied().collect();
        clip_unit(&mut x);
        Ok(x)
    }

    fn observe(&mut self, u: &[f64], merit: f64, solicited: bool, _: &History) {
        if !solicited {
            return;
        }
        let n = self.dim;
        let Some(state) = &mut self.state else {
            self.state = Some(State {
                mean: DVector::from_column_slice(u),
                sigma: self.sigma0,
                cov: DMatrix::identity(n, n),
                basis: DMatrix::identity(n, n),
                scales: DVector::from_element(n, 1.0),
                pc: DVector::zeros(n),
                ps: DVector::zeros(n),
                generation: 0,
                evaluated: Vec::with_capacity(self.params.lambda),
            });
            return;
        };
        let y = (DVector::from_column_slice(u) - &state.mean) / state.sigma;
        state.evaluated.push((y, merit));
        if state.evaluated.len() == self.params.lambda {
            self.update();
        }
    }
}
