//! Seeded Gaussian-mixture landscapes on the unit hypercube.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_COMPONENTS: usize = 4;

/// Per-axis standard deviations of each component are drawn from this range.
const SIGMA_RANGE: (f64, f64) = (0.05, 0.25);

/// Mountain-named presets; each seed is the peak height in meters.
pub const PRESETS: [(&str, u64); 6] = [
    ("denali", 6190),
    ("everest", 8848),
    ("k2", 8611),
    ("kilimanjaro", 5895),
    ("matterhorn", 4478),
    ("montblanc", 4808),
];

pub fn preset_seed(name: &str) -> Option<u64> {
    let key: String = name
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    PRESETS.iter().find(|(n, _)| *n == key).map(|(_, s)| *s)
}

pub fn preset_name(seed: u64) -> Option<&'static str> {
    PRESETS.iter().find(|(_, s)| *s == seed).map(|(n, _)| *n)
}

#[derive(Debug, Clone, Serialize)]
pub struct MixtureModel {
    pub seed: u64,
    pub diagonal: bool,
    pub means: Vec<Vec<f64>>,
    pub covariances: Vec<Vec<Vec<f64>>>,
    pub weights: Vec<f64>,
    #[serde(skip)]
    factors: Vec<Factor>,
}

#[derive(Debug, Clone)]
struct Factor {
    /// Lower Cholesky factor of the covariance.
    chol: DMatrix<f64>,
    /// log of the Gaussian normalization constant.
    log_norm: f64,
}

/// Draws a reproducible mixture: identical arguments always give identical models.
pub fn build_mixture(seed: u64, dim: usize, n_components: usize, diagonal: bool) -> Result<MixtureModel> {
    if dim < 1 {
        return Err(Error::Config("mixture dimension must be >= 1".into()));
    }
    if n_components < 1 {
        return Err(Error::Config("mixture needs at least one component".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = Vec::with_capacity(n_components);
    let mut covariances = Vec::with_capacity(n_components);
    let mut factors = Vec::with_capacity(n_components);

    for _ in 0..n_components {
        let mean: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let sigmas: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(SIGMA_RANGE.0..SIGMA_RANGE.1))
            .collect();
        let scales = DMatrix::from_diagonal(&DVector::from_iterator(dim, sigmas.iter().map(|s| s * s)));
        let cov = if diagonal {
            scales
        } else {
            let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
            let q = g.qr().q();
            let c = &q * scales * q.transpose();
            (&c + c.transpose()) * 0.5
        };
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Config("drew a covariance that is not positive definite".into()))?;
        let l = chol.l();
        let log_det: f64 = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
        factors.push(Factor {
            chol: l,
            log_norm: -0.5 * (dim as f64 * (2.0 * PI).ln() + log_det),
        });
        means.push(mean);
        covariances.push(
            (0..dim)
                .map(|r| (0..dim).map(|c| cov[(r, c)]).collect())
                .collect(),
        );
    }

    // Flat Dirichlet weights.
    let raw: Vec<f64> = (0..n_components)
        .map(|_| Exp1.sample(&mut rng))
        .map(|w: f64| w.max(1e-12))
        .collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();

    Ok(MixtureModel {
        seed,
        diagonal,
        means,
        covariances,
        weights,
        factors,
    })
}

impl MixtureModel {
    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn n_components(&self) -> usize {
        self.means.len()
    }

    /// Mixture density at `u`.
    pub fn density(&self, u: &[f64]) -> f64 {
        self.means
            .iter()
            .zip(&self.factors)
            .zip(&self.weights)
            .map(|((mean, f), w)| {
                let diff = DVector::from_iterator(u.len(), u.iter().zip(mean).map(|(a, b)| a - b));
                let z = f
                    .chol
                    .solve_lower_triangular(&diff)
                    .expect("Cholesky factor has a positive diagonal");
                w * (f.log_norm - 0.5 * z.norm_squared()).exp()
            })
            .sum()
    }

    /// Surface value: the negated density, so the tallest peak is the minimum.
    pub fn value(&self, u: &[f64]) -> f64 {
        -self.density(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probes(d: usize, n: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        (0..n).map(|_| (0..d).map(|_| rng.random()).collect()).collect()
    }

    #[test]
    fn same_seed_same_values() {
        let a = build_mixture(8848, 2, 4, false).unwrap();
        let b = build_mixture(8848, 2, 4, false).unwrap();
        for p in probes(2, 100) {
            assert_eq!(a.value(&p).to_bits(), b.value(&p).to_bits());
        }
    }

    #[test]
    fn different_seeds_differ_somewhere() {
        let a = build_mixture(1, 2, 4, false).unwrap();
        let b = build_mixture(2, 2, 4, false).unwrap();
        assert!(probes(2, 100).iter().any(|p| a.value(p) != b.value(p)));
    }

    #[test]
    fn diagonal_has_exact_zero_off_diagonals() {
        let m = build_mixture(5, 3, 3, true).unwrap();
        for cov in &m.covariances {
            for (r, row) in cov.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    if r != c {
                        assert_eq!(*v, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn covariances_are_symmetric_positive_definite() {
        let m = build_mixture(77, 4, 5, false).unwrap();
        for cov in &m.covariances {
            let mat = DMatrix::from_fn(4, 4, |r, c| cov[r][c]);
            assert_eq!(mat, mat.transpose());
            assert!(mat.symmetric_eigenvalues().iter().all(|l| *l > 0.0));
        }
        assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(m.means.iter().flatten().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn single_diagonal_component_matches_closed_form() {
        let m = build_mixture(3, 1, 1, true).unwrap();
        let (mu, var) = (m.means[0][0], m.covariances[0][0][0]);
        let u = 0.4;
        let expect = (-(u - mu) * (u - mu) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
        assert!((m.density(&[u]) - expect).abs() < 1e-12 * expect.max(1.0));
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(build_mixture(1, 0, 2, false).is_err());
        assert!(build_mixture(1, 2, 0, false).is_err());
    }

    #[test]
    fn presets_resolve_by_name() {
        assert_eq!(preset_seed("Everest"), Some(8848));
        assert_eq!(preset_seed("Mont-Blanc"), Some(4808));
        assert_eq!(preset_name(8611), Some("k2"));
        assert_eq!(preset_seed("olympus"), None);
    }
}
