//! Bounded continuous parameter domains and points inside them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    #[default]
    Minimize,
    Maximize,
}

impl Goal {
    /// Maps a raw measurement to a merit that is always minimized.
    pub fn to_merit(self, value: f64) -> f64 {
        match self {
            Goal::Minimize => value,
            Goal::Maximize => -value,
        }
    }

    /// True when `a` is strictly better than `b` under this goal.
    pub fn is_better(self, a: f64, b: f64) -> bool {
        match self {
            Goal::Minimize => a < b,
            Goal::Maximize => a > b,
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Goal::Minimize => "minimize",
            Goal::Maximize => "maximize",
        })
    }
}

impl FromStr for Goal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minimize" | "min" => Ok(Goal::Minimize),
            "maximize" | "max" => Ok(Goal::Maximize),
            other => Err(Error::Config(format!("unknown goal `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamDef {
    pub name: String,
    pub low: f64,
    pub high: f64,
}

impl ParamDef {
    pub fn new(name: impl Into<String>, low: f64, high: f64) -> Self {
        ParamDef {
            name: name.into(),
            low,
            high,
        }
    }

    pub fn range(&self) -> f64 {
        self.high - self.low
    }
}

/// An ordered list of named, bounded, continuous parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ParamDef>", into = "Vec<ParamDef>")]
pub struct ParamSpace {
    params: Vec<ParamDef>,
}

impl TryFrom<Vec<ParamDef>> for ParamSpace {
    type Error = Error;

    fn try_from(params: Vec<ParamDef>) -> Result<Self> {
        ParamSpace::new(params)
    }
}

impl From<ParamSpace> for Vec<ParamDef> {
    fn from(space: ParamSpace) -> Self {
        space.params
    }
}

impl ParamSpace {
    pub fn new(params: Vec<ParamDef>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::Config("parameter space needs at least one parameter".into()));
        }
        let mut seen = HashSet::new();
        for p in &params {
            if p.name.is_empty() {
                return Err(Error::Config("parameter names must be non-empty".into()));
            }
            if !seen.insert(p.name.as_str()) {
                return Err(Error::Config(format!("duplicate parameter name `{}`", p.name)));
            }
            if !(p.low.is_finite() && p.high.is_finite() && p.low < p.high) {
                return Err(Error::Config(format!(
                    "parameter `{}` needs finite bounds with low < high (got [{}, {}])",
                    p.name, p.low, p.high
                )));
            }
        }
        Ok(ParamSpace { params })
    }

    /// The unit hypercube `[0, 1]^d` with parameters named `x1..xd`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::uniform(dim, 0.0, 1.0)
    }

    pub fn uniform(dim: usize, low: f64, high: f64) -> Result<Self> {
        Self::new(
            (1..=dim)
                .map(|i| ParamDef::new(format!("x{i}"), low, high))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[ParamDef] {
        &self.params
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.dim()
            && values
                .iter()
                .zip(&self.params)
                .all(|(v, p)| *v >= p.low && *v <= p.high)
    }

    /// Validates `values` as a point of this space.
    pub fn vector(&self, values: Vec<f64>) -> Result<ParamVector> {
        self.check_dim(values.len())?;
        for (v, p) in values.iter().zip(&self.params) {
            if !(*v >= p.low && *v <= p.high) {
                return Err(Error::Domain(format!(
                    "parameter `{}` = {} outside [{}, {}]",
                    p.name, v, p.low, p.high
                )));
            }
        }
        Ok(ParamVector(values))
    }

    /// Clamps every component into bounds. NaN components map to the lower bound.
    pub fn clip(&self, values: &[f64]) -> Result<ParamVector> {
        self.check_dim(values.len())?;
        Ok(ParamVector(
            values
                .iter()
                .zip(&self.params)
                .map(|(v, p)| if v.is_nan() { p.low } else { v.clamp(p.low, p.high) })
                .collect(),
        ))
    }

    pub fn project_to_unit(&self, x: &ParamVector) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(x.iter()
            .zip(&self.params)
            .map(|(v, p)| (v - p.low) / p.range())
            .collect())
    }

    /// Inverse of [`ParamSpace::project_to_unit`]. Results are clamped so that
    /// rounding never pushes a lifted endpoint outside the bounds.
    pub fn lift_from_unit(&self, u: &[f64]) -> Result<ParamVector> {
        self.check_dim(u.len())?;
        Ok(ParamVector(
            u.iter()
                .zip(&self.params)
                .map(|(t, p)| (p.low + t * p.range()).clamp(p.low, p.high))
                .collect(),
        ))
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Contract(format!(
                "expected {} parameters, got {}",
                self.dim(),
                len
            )));
        }
        Ok(())
    }
}

/// A point of a [`ParamSpace`]. Obtain one through [`ParamSpace::vector`],
/// [`ParamSpace::clip`] or [`ParamSpace::lift_from_unit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Unchecked; consumers such as `Planner::tell` validate bounds themselves.
impl From<Vec<f64>> for ParamVector {
    fn from(values: Vec<f64>) -> Self {
        ParamVector(values)
    }
}

impl std::ops::Deref for ParamVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}
