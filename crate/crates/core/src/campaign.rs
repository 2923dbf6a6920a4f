use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Goal, ParamSpace, ParamVector};

/// One evaluated point. Parameters are stored in the physical domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Observation {
    pub params: ParamVector,
    pub value: f64,
    pub eval_index: u64,
    #[serde(default)]
    pub timestamp: String,
}

// Timestamps are informational and never take part in equality.
impl PartialEq for Observation {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.value.to_bits() == other.value.to_bits()
            && self.eval_index == other.eval_index
    }
}

impl Observation {
    pub fn new(params: ParamVector, value: f64, eval_index: u64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite(format!(
                "observation {eval_index} has value {value}"
            )));
        }
        Ok(Observation {
            params,
            value,
            eval_index,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub id: String,
    pub planner: String,
    pub surface: String,
    pub goal: Goal,
    pub seed: u64,
    pub space: ParamSpace,
    pub observations: Vec<Observation>,
    /// Set when the campaign stopped early; `observations` then holds the completed prefix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Campaign {
    pub fn new(
        id: impl Into<String>,
        planner: impl Into<String>,
        surface: impl Into<String>,
        goal: Goal,
        seed: u64,
        space: ParamSpace,
    ) -> Self {
        Campaign {
            id: id.into(),
            planner: planner.into(),
            surface: surface.into(),
            goal,
            seed,
            space,
            observations: Vec::new(),
            error: None,
        }
    }

    /// Appends an observation, enforcing the campaign's invariants.
    pub fn record(&mut self, obs: Observation) -> Result<()> {
        if !self.space.contains(&obs.params) {
            return Err(Error::Domain(format!(
                "observation {} lies outside the campaign space",
                obs.eval_index
            )));
        }
        if !obs.value.is_finite() {
            return Err(Error::NonFinite(format!("observation {}", obs.eval_index)));
        }
        if let Some(last) = self.observations.last() {
            if obs.eval_index <= last.eval_index {
                return Err(Error::Contract(format!(
                    "eval_index {} does not follow {}",
                    obs.eval_index, last.eval_index
                )));
            }
        } else if obs.eval_index < 1 {
            return Err(Error::Contract("eval_index starts at 1".into()));
        }
        self.observations.push(obs);
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    pub fn best_so_far(&self) -> Result<Vec<f64>> {
        best_so_far(&self.values(), self.goal)
    }

    /// Best observation; ties resolve to the earliest evaluation.
    pub fn best(&self) -> Option<&Observation> {
        self.observations.iter().fold(None, |best, o| match best {
            Some(b) if !self.goal.is_better(o.value, b.value) => Some(b),
            _ => Some(o),
        })
    }

    pub fn is_complete(&self) -> bool {
        self.error.is_none()
    }
}

/// Running extremum of `values` under `goal`.
pub fn best_so_far(values: &[f64], goal: Goal) -> Result<Vec<f64>> {
    let first = *values.first().ok_or(Error::EmptyTrace)?;
    let mut best = first;
    Ok(values
        .iter()
        .map(|&v| {
            if goal.is_better(v, best) {
                best = v;
            }
            best
        })
        .collect())
}
