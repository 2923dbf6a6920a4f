//! Zero-mean response noise. Samplers hold no state; callers own the RNG stream.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use rand::RngCore;
use rand_distr::{Distribution, Gamma, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GAMMA_SHAPE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    Uniform,
    Gamma,
    Custom,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseExtra {
    /// Gamma shape `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<f64>,
    /// Name of a sampler registered with [`register_custom_noise`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub scale: f64,
    #[serde(default)]
    pub extra: NoiseExtra,
}

/// A user-supplied sampler: receives the configured scale and the caller's stream.
pub type CustomSampler = Arc<dyn Fn(f64, &mut dyn RngCore) -> f64 + Send + Sync>;

fn registry() -> &'static RwLock<HashMap<String, CustomSampler>> {
    static REGISTRY: OnceLock<RwLock<HashMap<String, CustomSampler>>> = OnceLock::new();
    REGISTRY.get_or_init(Default::default)
}

/// Registers (or replaces) a named custom noise sampler.
pub fn register_custom_noise(name: impl Into<String>, sampler: CustomSampler) -> Result<()> {
    let name = name.into();
    if name.is_empty() {
        return Err(Error::Config("custom noise needs a name".into()));
    }
    registry()
        .write()
        .expect("noise registry poisoned")
        .insert(name, sampler);
    Ok(())
}

impl NoiseSpec {
    pub fn gaussian(scale: f64) -> Result<Self> {
        Self::new(NoiseKind::Gaussian, scale, NoiseExtra::default())
    }

    pub fn uniform(scale: f64) -> Result<Self> {
        Self::new(NoiseKind::Uniform, scale, NoiseExtra::default())
    }

    pub fn gamma(scale: f64, shape: f64) -> Result<Self> {
        Self::new(
            NoiseKind::Gamma,
            scale,
            NoiseExtra {
                shape: Some(shape),
                name: None,
            },
        )
    }

    pub fn custom(name: impl Into<String>, scale: f64) -> Result<Self> {
        Self::new(
            NoiseKind::Custom,
            scale,
            NoiseExtra {
                shape: None,
                name: Some(name.into()),
            },
        )
    }

    pub fn new(kind: NoiseKind, scale: f64, extra: NoiseExtra) -> Result<Self> {
        let spec = NoiseSpec { kind, scale, extra };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Config(format!("noise scale must be > 0, got {}", self.scale)));
        }
        match self.kind {
            NoiseKind::Gamma => {
                let k = self.gamma_shape();
                if !(k.is_finite() && k > 0.0) {
                    return Err(Error::Config(format!("gamma shape must be > 0, got {k}")));
                }
            }
            NoiseKind::Custom => {
                if self.extra.name.as_deref().unwrap_or("").is_empty() {
                    return Err(Error::Config("custom noise needs extra.name".into()));
                }
            }
            NoiseKind::Gaussian | NoiseKind::Uniform => {}
        }
        Ok(())
    }

    pub fn gamma_shape(&self) -> f64 {
        self.extra.shape.unwrap_or(DEFAULT_GAMMA_SHAPE)
    }

    /// Draws one perturbation.
    ///
    /// Built-in kinds have mean 0 and standard deviation `scale`, except
    /// `Uniform`, which is supported on `[-scale, scale]`.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Result<f64> {
        let s = self.scale;
        let value = match self.kind {
            NoiseKind::Gaussian => Normal::new(0.0, s)
                .map_err(|e| Error::Config(e.to_string()))?
                .sample(rng),
            NoiseKind::Uniform => Uniform::new_inclusive(-s, s)
                .map_err(|e| Error::Config(e.to_string()))?
                .sample(rng),
            NoiseKind::Gamma => {
                // std of Gamma(k, theta) is sqrt(k) * theta
                let k = self.gamma_shape();
                let theta = s / k.sqrt();
                let g = Gamma::new(k, theta).map_err(|e| Error::Config(e.to_string()))?;
                g.sample(rng) - k * theta
            }
            NoiseKind::Custom => {
                let name = self.extra.name.as_deref().unwrap_or_default();
                let sampler = registry()
                    .read()
                    .expect("noise registry poisoned")
                    .get(name)
                    .cloned()
                    .ok_or_else(|| Error::NotFound(format!("custom noise `{name}`")))?;
                sampler(s, rng)
            }
        };
        if !value.is_finite() {
            return Err(Error::Evaluation(format!("{self} produced {value}")));
        }
        Ok(value)
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NoiseKind::Gaussian => write!(f, "gaussian:{}", self.scale),
            NoiseKind::Uniform => write!(f, "uniform:{}", self.scale),
            NoiseKind::Gamma => write!(f, "gamma:{},k={}", self.scale, self.gamma_shape()),
            NoiseKind::Custom => write!(
                f,
                "custom:{},name={}",
                self.scale,
                self.extra.name.as_deref().unwrap_or_default()
            ),
        }
    }
}

/// Parses `<kind>:<scale>[,k=<shape>][,name=<sampler>]`, e.g. `gaussian:0.5`.
impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("noise `{s}` must look like kind:scale")))?;
        let kind = match kind.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => NoiseKind::Gaussian,
            "uniform" => NoiseKind::Uniform,
            "gamma" => NoiseKind::Gamma,
            "custom" => NoiseKind::Custom,
            other => return Err(Error::Config(format!("unknown noise kind `{other}`"))),
        };
        let mut parts = rest.split(',');
        let scale = parts
            .next()
            .unwrap_or_default()
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("bad noise scale in `{s}`: {e}")))?;
        let mut extra = NoiseExtra::default();
        for part in parts {
            match part.split_once('=') {
                Some(("k" | "shape", v)) => {
                    extra.shape = Some(
                        v.parse()
                            .map_err(|e| Error::Config(format!("bad gamma shape `{v}`: {e}")))?,
                    )
                }
                Some(("name", v)) => extra.name = Some(v.to_string()),
                _ => return Err(Error::Config(format!("unknown noise option `{part}`"))),
            }
        }
        NoiseSpec::new(kind, scale, extra)
    }
}
