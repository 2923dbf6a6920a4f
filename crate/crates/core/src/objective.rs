//! The evaluator abstraction shared by surfaces, emulators and planners.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::space::{ParamSpace, ParamVector};

/// Anything a campaign can query: a surface, an emulator, or a wrapper around one.
pub trait Objective: Send + Sync {
    /// Stable identifier used to group campaigns by target.
    fn id(&self) -> String;

    fn space(&self) -> &ParamSpace;

    /// Noise-free response.
    fn clean(&self, x: &ParamVector) -> Result<f64>;

    fn noise(&self) -> Option<&NoiseSpec> {
        None
    }

    /// Response as an experiment would report it: the clean value plus any
    /// configured stochastic perturbation drawn from `rng`.
    fn evaluate(&self, x: &ParamVector, rng: &mut dyn RngCore) -> Result<f64> {
        let value = self.clean(x)?;
        match self.noise() {
            Some(noise) => Ok(value + noise.sample(rng)?),
            None => Ok(value),
        }
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn space(&self) -> &ParamSpace {
        (**self).space()
    }
    fn clean(&self, x: &ParamVector) -> Result<f64> {
        (**self).clean(x)
    }
    fn noise(&self) -> Option<&NoiseSpec> {
        (**self).noise()
    }
    fn evaluate(&self, x: &ParamVector, rng: &mut dyn RngCore) -> Result<f64> {
        (**self).evaluate(x, rng)
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn id(&self) -> String {
        (**self).id()
    }
    fn space(&self) -> &ParamSpace {
        (**self).space()
    }
    fn clean(&self, x: &ParamVector) -> Result<f64> {
        (**self).clean(x)
    }
    fn noise(&self) -> Option<&NoiseSpec> {
        (**self).noise()
    }
    fn evaluate(&self, x: &ParamVector, rng: &mut dyn RngCore) -> Result<f64> {
        (**self).evaluate(x, rng)
    }
}

/// An objective with response noise attached after construction.
#[derive(Debug, Clone)]
pub struct Noisy<T> {
    inner: T,
    noise: NoiseSpec,
}

/// Wraps `target` so every evaluation adds a draw from `noise`.
///
/// Fails if the target already carries noise.
pub fn attach<T: Objective>(target: T, noise: NoiseSpec) -> Result<Noisy<T>> {
    noise.validate()?;
    if let Some(existing) = target.noise() {
        return Err(Error::Config(format!(
            "`{}` already has noise {existing} attached",
            target.id()
        )));
    }
    Ok(Noisy {
        inner: target,
        noise,
    })
}

impl<T> Noisy<T> {
    pub fn inner(&self) -> &T {
        &self.inner
    }
}

impl<T: Objective> Objective for Noisy<T> {
    fn id(&self) -> String {
        format!("{}+{}", self.inner.id(), self.noise)
    }
    fn space(&self) -> &ParamSpace {
        self.inner.space()
    }
    fn clean(&self, x: &ParamVector) -> Result<f64> {
        self.inner.clean(x)
    }
    fn noise(&self) -> Option<&NoiseSpec> {
        Some(&self.noise)
    }
    fn evaluate(&self, x: &ParamVector, rng: &mut dyn RngCore) -> Result<f64> {
        Ok(self.inner.evaluate(x, rng)? + self.noise.sample(rng)?)
    }
}

/// Flips the sign of every response.
#[derive(Debug, Clone)]
pub struct Negated<T>(pub T);

impl<T: Objective> Objective for Negated<T> {
    fn id(&self) -> String {
        format!("neg({})", self.0.id())
    }
    fn space(&self) -> &ParamSpace {
        self.0.space()
    }
    fn clean(&self, x: &ParamVector) -> Result<f64> {
        Ok(-self.0.clean(x)?)
    }
    fn noise(&self) -> Option<&NoiseSpec> {
        self.0.noise()
    }
    fn evaluate(&self, x: &ParamVector, rng: &mut dyn RngCore) -> Result<f64> {
        Ok(-self.0.evaluate(x, rng)?)
    }
}

/// An objective backed by a plain function of the physical parameters.
pub struct FnObjective<F> {
    id: String,
    space: ParamSpace,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(id: impl Into<String>, space: ParamSpace, f: F) -> Self {
        FnObjective {
            id: id.into(),
            space,
            f,
        }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn id(&self) -> String {
        self.id.clone()
    }
    fn space(&self) -> &ParamSpace {
        &self.space
    }
    fn clean(&self, x: &ParamVector) -> Result<f64> {
        if !self.space.contains(x) {
            return Err(Error::Domain(format!("{:?} outside `{}` domain", x.as_slice(), self.id)));
        }
        Ok((self.f)(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero() -> FnObjective<impl Fn(&[f64]) -> f64 + Send + Sync> {
        FnObjective::new("zero", ParamSpace::unit(1).unwrap(), |_| 0.0)
    }

    #[test]
    fn attached_gaussian_has_requested_spread() {
        let noisy = attach(zero(), NoiseSpec::gaussian(0.5).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = noisy.space().vector(vec![0.3]).unwrap();
        let n = 10_000;
        let xs: Vec<f64> = (0..n).map(|_| noisy.evaluate(&x, &mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((sd - 0.5).abs() < 0.02, "sd {sd}");
        assert_eq!(noisy.clean(&x).unwrap(), 0.0);
    }

    #[test]
    fn double_attachment_is_rejected() {
        let once = attach(zero(), NoiseSpec::uniform(1.0).unwrap()).unwrap();
        assert!(matches!(
            attach(once, NoiseSpec::gaussian(1.0).unwrap()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn no_noise_is_identity() {
        let f = FnObjective::new("lin", ParamSpace::unit(1).unwrap(), |x| 3.0 * x[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = f.space().vector(vec![0.25]).unwrap();
        assert_eq!(f.evaluate(&x, &mut rng).unwrap(), f.clean(&x).unwrap());
        assert_eq!(Negated(&f).evaluate(&x, &mut rng).unwrap(), -0.75);
    }
}
