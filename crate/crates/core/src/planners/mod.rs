//! Ask/tell planners.
//!
//! Every built-in strategy works on the unit hypercube and minimizes a merit;
//! [`Planner`] maps between the user's [`ParamSpace`] and unit coordinates and
//! flips the sign of measurements for maximization goals.

mod basin;
mod cmaes;
mod descent;
mod differential;
mod genetic;
mod gp;
mod grid;
mod lhs;
mod random;
mod simplex;
pub mod sobol;
mod swarm;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::campaign::{Campaign, Observation};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::space::{Goal, ParamSpace, ParamVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlannerKind {
    RandomSearch,
    GridSearch,
    LatinHypercube,
    Sobol,
    Simplex,
    SteepestDescent,
    DifferentialEvolution,
    ParticleSwarm,
    CmaEs,
    Genetic,
    BasinHopping,
    GpBayesOpt,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 12] = [
        PlannerKind::RandomSearch,
        PlannerKind::GridSearch,
        PlannerKind::LatinHypercube,
        PlannerKind::Sobol,
        PlannerKind::Simplex,
        PlannerKind::SteepestDescent,
        PlannerKind::DifferentialEvolution,
        PlannerKind::ParticleSwarm,
        PlannerKind::CmaEs,
        PlannerKind::Genetic,
        PlannerKind::BasinHopping,
        PlannerKind::GpBayesOpt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::RandomSearch => "RandomSearch",
            PlannerKind::GridSearch => "GridSearch",
            PlannerKind::LatinHypercube => "LatinHypercube",
            PlannerKind::Sobol => "Sobol",
            PlannerKind::Simplex => "Simplex",
            PlannerKind::SteepestDescent => "SteepestDescent",
            PlannerKind::DifferentialEvolution => "DifferentialEvolution",
            PlannerKind::ParticleSwarm => "ParticleSwarm",
            PlannerKind::CmaEs => "CmaEs",
            PlannerKind::Genetic => "Genetic",
            PlannerKind::BasinHopping => "BasinHopping",
            PlannerKind::GpBayesOpt => "GpBayesOpt",
        }
    }

    /// Accepted hyperparameter names with their defaults (`None` = derived at construction).
    pub fn hyperparams(self) -> &'static [(&'static str, Option<f64>)] {
        match self {
            PlannerKind::RandomSearch | PlannerKind::Sobol => &[],
            PlannerKind::GridSearch => &[("levels", None)],
            PlannerKind::LatinHypercube => &[("samples", None)],
            PlannerKind::Simplex => &[("step", Some(simplex::DEFAULT_STEP))],
            PlannerKind::SteepestDescent => &[
                ("step", Some(descent::DEFAULT_STEP)),
                ("fd_step", Some(descent::DEFAULT_FD_STEP)),
            ],
            PlannerKind::DifferentialEvolution => &[
                ("popsize", None),
                ("f", Some(differential::DEFAULT_F)),
                ("cr", Some(differential::DEFAULT_CR)),
            ],
            PlannerKind::ParticleSwarm => &[
                ("swarm", None),
                ("inertia", Some(swarm::DEFAULT_INERTIA)),
                ("cognitive", Some(swarm::DEFAULT_ACCEL)),
                ("social", Some(swarm::DEFAULT_ACCEL)),
            ],
            PlannerKind::CmaEs => &[("popsize", None), ("sigma0", Some(cmaes::DEFAULT_SIGMA0))],
            PlannerKind::Genetic => &[
                ("popsize", None),
                ("mutation_rate", None),
                ("mutation_sigma", Some(genetic::DEFAULT_MUTATION_SIGMA)),
                ("blend_alpha", Some(genetic::DEFAULT_BLEND_ALPHA)),
            ],
            PlannerKind::BasinHopping => &[
                ("step", Some(basin::DEFAULT_PERTURBATION)),
                ("temperature", Some(basin::DEFAULT_TEMPERATURE)),
                ("local_evals", None),
            ],
            PlannerKind::GpBayesOpt => &[
                ("init_points", Some(gp::DEFAULT_INIT_POINTS as f64)),
                ("nugget", Some(gp::DEFAULT_NUGGET)),
                ("xi", Some(0.0)),
                ("candidates", Some(gp::DEFAULT_CANDIDATES as f64)),
            ],
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let kind = match key.as_str() {
            "random" | "randomsearch" => PlannerKind::RandomSearch,
            "grid" | "gridsearch" => PlannerKind::GridSearch,
            "lhs" | "latinhypercube" => PlannerKind::LatinHypercube,
            "sobol" => PlannerKind::Sobol,
            "simplex" | "neldermead" => PlannerKind::Simplex,
            "steepest" | "steepestdescent" | "gradient" => PlannerKind::SteepestDescent,
            "de" | "differentialevolution" => PlannerKind::DifferentialEvolution,
            "pso" | "particleswarm" | "particleswarms" => PlannerKind::ParticleSwarm,
            "cmaes" | "cma" => PlannerKind::CmaEs,
            "genetic" | "ga" => PlannerKind::Genetic,
            "basinhopping" | "basin" => PlannerKind::BasinHopping,
            "gp" | "gpbayesopt" | "bayesopt" | "gpyopt" => PlannerKind::GpBayesOpt,
            _ => return Err(Error::Config(format!("unknown planner `{s}`"))),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub name: String,
    #[serde(default)]
    pub goal: Goal,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub hyperparams: BTreeMap<String, f64>,
}

impl PlannerConfig {
    pub fn new(name: impl Into<String>, goal: Goal, seed: u64) -> Self {
        PlannerConfig {
            name: name.into(),
            goal,
            seed,
            hyperparams: BTreeMap::new(),
        }
    }

    pub fn builtin(kind: PlannerKind, goal: Goal, seed: u64) -> Self {
        Self::new(kind.name(), goal, seed)
    }

    pub fn set(mut self, key: impl Into<String>, value: f64) -> Self {
        self.hyperparams.insert(key.into(), value);
        self
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        PlannerConfig {
            seed,
            ..self.clone()
        }
    }

    /// Canonical planner name (built-in names are normalized).
    pub fn display_name(&self) -> String {
        self.name
            .parse::<PlannerKind>()
            .map(|k| k.name().to_string())
            .unwrap_or_else(|_| self.name.clone())
    }

    /// Display name plus any hyperparameter overrides, e.g. `CmaEs[popsize=16]`.
    pub fn label(&self) -> String {
        let name = self.display_name();
        if self.hyperparams.is_empty() {
            return name;
        }
        let set: Vec<String> = self.hyperparams.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{name}[{}]", set.join(","))
    }
}

/// Hyperparameters after validation against a planner's schema.
#[derive(Debug, Clone)]
pub(crate) struct Hyper {
    values: BTreeMap<String, f64>,
}

impl Hyper {
    fn validate(name: &str, accepted: &[&str], given: &BTreeMap<String, f64>) -> Result<Self> {
        for (key, value) in given {
            if !accepted.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "planner `{name}` has no hyperparameter `{key}` (accepted: {})",
                    if accepted.is_empty() { "none".to_string() } else { accepted.join(", ") }
                )));
            }
            if !value.is_finite() {
                return Err(Error::Config(format!("hyperparameter `{key}` must be finite")));
            }
        }
        Ok(Hyper {
            values: given.clone(),
        })
    }

    pub(crate) fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub(crate) fn or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }

    /// Positive integer hyperparameter.
    pub(crate) fn count(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default.max(min)),
            Some(v) if v.fract() == 0.0 && v >= min as f64 => Ok(v as usize),
            Some(v) => Err(Error::Config(format!("`{key}` must be an integer >= {min}, got {v}"))),
        }
    }

    pub(crate) fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.or(key, default);
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Config(format!("`{key}` must be > 0, got {v}")))
        }
    }
}

/// Observations seen so far, in tell order, in both unit and physical form.
#[derive(Debug, Clone, Default)]
pub struct History {
    pub units: Vec<Vec<f64>>,
    /// Minimization merits (sign-flipped for maximization goals).
    pub merits: Vec<f64>,
    pub params: Vec<ParamVector>,
    pub values: Vec<f64>,
}

impl History {
    pub fn len(&self) -> usize {
        self.merits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merits.is_empty()
    }

    /// Index of the best merit; ties resolve to the earliest.
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, m) in self.merits.iter().enumerate() {
            if best.is_none_or(|b| *m < self.merits[b]) {
                best = Some(i);
            }
        }
        best
    }
}

/// A search strategy on the unit hypercube that minimizes merits.
pub(crate) trait Strategy: Send {
    fn propose(&mut self, rng: &mut ChaCha8Rng, history: &History) -> Result<Vec<f64>>;

    /// `solicited` is true when `u` is exactly the point of the last proposal.
    fn observe(&mut self, u: &[f64], merit: f64, solicited: bool, history: &History);

    /// Evaluation budget of the surrounding campaign, given before the first proposal.
    fn budget_hint(&mut self, _budget: usize) {}
}

pub(crate) fn uniform_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    use rand::Rng;
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

pub(crate) fn clip_unit(u: &mut [f64]) {
    for v in u.iter_mut() {
        *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    }
}

fn build_strategy(kind: PlannerKind, dim: usize, hyper: &Hyper) -> Result<Box<dyn Strategy>> {
    Ok(match kind {
        PlannerKind::RandomSearch => Box::new(random::RandomSearch::new(dim)),
        PlannerKind::GridSearch => Box::new(grid::GridSearch::new(dim, hyper)?),
        PlannerKind::LatinHypercube => Box::new(lhs::LatinHypercube::new(dim, hyper)?),
        PlannerKind::Sobol => Box::new(sobol::SobolPlanner::new(dim)?),
        PlannerKind::Simplex => Box::new(simplex::SimplexPlanner::new(dim, hyper)?),
        PlannerKind::SteepestDescent => Box::new(descent::SteepestDescent::new(dim, hyper)?),
        PlannerKind::DifferentialEvolution => Box::new(differential::DifferentialEvolution::new(dim, hyper)?),
        PlannerKind::ParticleSwarm => Box::new(swarm::ParticleSwarm::new(dim, hyper)?),
        PlannerKind::CmaEs => Box::new(cmaes::CmaEs::new(dim, hyper)?),
        PlannerKind::Genetic => Box::new(genetic::Genetic::new(dim, hyper)?),
        PlannerKind::BasinHopping => Box::new(basin::BasinHopping::new(dim, hyper)?),
        PlannerKind::GpBayesOpt => Box::new(gp::GpBayesOpt::new(dim, hyper)?),
    })
}

/// Everything a custom ask function may look at.
pub struct AskContext<'a> {
    pub space: &'a ParamSpace,
    /// Previously told parameters, in tell order.
    pub params: &'a [ParamVector],
    /// Raw measurements matching `params`.
    pub values: &'a [f64],
    pub goal: Goal,
    pub hyperparams: &'a BTreeMap<String, f64>,
    pub rng: &'a mut ChaCha8Rng,
}

/// Proposes the next physical point; out-of-bounds proposals are clipped.
pub type AskFn = Arc<dyn Fn(&mut AskContext<'_>) -> Vec<f64> + Send + Sync>;

/// A user-defined planner, registered by name with [`register_custom`].
#[derive(Clone, Default)]
pub struct CustomPlannerDef {
    pub name: String,
    pub ask: Option<AskFn>,
    /// Hyperparameter names the custom planner accepts.
    pub hyperparams: Vec<String>,
}

impl CustomPlannerDef {
    pub fn new(name: impl Into<String>) -> Self {
        CustomPlannerDef {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn ask<F>(mut self, f: F) -> Self
    where
        F: Fn(&mut AskContext<'_>) -> Vec<f64> + Send + Sync + 'static,
    {
        self.ask = Some(Arc::new(f));
        self
    }
}

fn custom_registry() -> &'static RwLock<HashMap<String, CustomPlannerDef>> {
    static REGISTRY: OnceLock<RwLock<HashMap<String, CustomPlannerDef>>> = OnceLock::new();
    REGISTRY.get_or_init(Default::default)
}

/// Makes a custom planner constructible by name everywhere a built-in one is.
pub fn register_custom(def: CustomPlannerDef) -> Result<()> {
    if def.name.trim().is_empty() {
        return Err(Error::Config("custom planner needs a name".into()));
    }
    if def.name.parse::<PlannerKind>().is_ok() {
        return Err(Error::Config(format!(
            "`{}` collides with a built-in planner name",
            def.name
        )));
    }
    if def.ask.is_none() {
        return Err(Error::Config(format!(
            "custom planner `{}` does not provide an ask function",
            def.name
        )));
    }
    custom_registry()
        .write()
        .expect("planner registry poisoned")
        .insert(def.name.clone(), def);
    Ok(())
}

enum Engine {
    Builtin(Box<dyn Strategy>),
    Custom(AskFn),
}

/// A configured planner bound to a parameter space.
pub struct Planner {
    config: PlannerConfig,
    name: String,
    space: ParamSpace,
    rng: ChaCha8Rng,
    engine: Engine,
    pending: Option<(ParamVector, Vec<f64>)>,
    history: History,
    budget_known: bool,
}

impl fmt::Debug for Planner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Planner")
            .field("config", &self.config)
            .field("observations", &self.history.len())
            .finish()
    }
}

impl Planner {
    pub fn new(config: PlannerConfig, space: ParamSpace) -> Result<Self> {
        let (name, engine) = match config.name.parse::<PlannerKind>() {
            Ok(kind) => {
                let accepted: Vec<&str> = kind.hyperparams().iter().map(|(n, _)| *n).collect();
                let hyper = Hyper::validate(kind.name(), &accepted, &config.hyperparams)?;
                (kind.name().to_string(), Engine::Builtin(build_strategy(kind, space.dim(), &hyper)?))
            }
            Err(_) => {
                let registry = custom_registry().read().expect("planner registry poisoned");
                let def = registry
                    .get(&config.name)
                    .ok_or_else(|| Error::Config(format!("unknown planner `{}`", config.name)))?;
                let accepted: Vec<&str> = def.hyperparams.iter().map(String::as_str).collect();
                Hyper::validate(&def.name, &accepted, &config.hyperparams)?;
                let ask = def.ask.clone().expect("registration guarantees an ask function");
                (def.name.clone(), Engine::Custom(ask))
            }
        };
        Ok(Planner {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            name,
            space,
            engine,
            pending: None,
            history: History::default(),
            budget_known: false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn space(&self) -> &ParamSpace {
        &self.space
    }

    pub fn goal(&self) -> Goal {
        self.config.goal
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    /// Tells the strategy how many evaluations the campaign will run.
    /// Only effective before the first ask.
    pub fn set_budget(&mut self, budget: usize) {
        if self.history.is_empty() && self.pending.is_none() && !self.budget_known {
            if let Engine::Builtin(s) = &mut self.engine {
                s.budget_hint(budget);
            }
            self.budget_known = true;
        }
    }

    /// Next point to evaluate. Asking again before telling returns the same point.
    pub fn ask(&mut self) -> Result<ParamVector> {
        if let Some((x, _)) = &self.pending {
            return Ok(x.clone());
        }
        let (x, u) = match &mut self.engine {
            Engine::Builtin(strategy) => {
                let mut u = strategy.propose(&mut self.rng, &self.history)?;
                clip_unit(&mut u);
                (self.space.lift_from_unit(&u)?, u)
            }
            Engine::Custom(ask) => {
                let mut ctx = AskContext {
                    space: &self.space,
                    params: &self.history.params,
                    values: &self.history.values,
                    goal: self.config.goal,
                    hyperparams: &self.config.hyperparams,
                    rng: &mut self.rng,
                };
                let raw = ask(&mut ctx);
                if raw.len() != self.space.dim() {
                    return Err(Error::Contract(format!(
                        "custom planner `{}` returned {} values for a {}-dimensional space",
                        self.name,
                        raw.len(),
                        self.space.dim()
                    )));
                }
                if !self.space.contains(&raw) {
                    log::warn!(
                        "custom planner `{}` proposed out-of-bounds point {:?}; clipping",
                        self.name,
                        raw
                    );
                }
                let x = self.space.clip(&raw)?;
                let u = self.space.project_to_unit(&x)?;
                (x, u)
            }
        };
        self.pending = Some((x.clone(), u));
        Ok(x)
    }

    /// Reports the measurement for `params`. Any in-bounds point is accepted;
    /// points that were not just asked count as warm-start data.
    pub fn tell(&mut self, params: &ParamVector, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("told value {value}")));
        }
        if !self.space.contains(params) {
            return Err(Error::Domain(format!(
                "told point {:?} lies outside the planner's space",
                params.as_slice()
            )));
        }
        let merit = self.config.goal.to_merit(value);
        let (u, solicited) = match self.pending.take() {
            Some((x, u)) if &x == params => (u, true),
            _ => (self.space.project_to_unit(params)?, false),
        };
        self.history.units.push(u.clone());
        self.history.merits.push(merit);
        self.history.params.push(params.clone());
        self.history.values.push(value);
        if let Engine::Builtin(strategy) = &mut self.engine {
            strategy.observe(&u, merit, solicited, &self.history);
        }
        Ok(())
    }

    /// Runs `num_iter` ask, evaluate, tell rounds against `objective`.
    ///
    /// A failure after the first round does not discard work: the campaign
    /// comes back with the completed prefix and its `error` field set.
    pub fn optimize(&mut self, objective: &dyn Objective, num_iter: usize) -> Result<Campaign> {
        if num_iter < 1 {
            return Err(Error::Config("num_iter must be >= 1".into()));
        }
        if objective.space() != &self.space {
            return Err(Error::Contract(format!(
                "planner space does not match the space of `{}`",
                objective.id()
            )));
        }
        self.set_budget(num_iter);
        let target = objective.id();
        let mut campaign = Campaign::new(
            format!("{}/{}/seed-{}", target, self.name, self.config.seed),
            self.name.clone(),
            target,
            self.config.goal,
            self.config.seed,
            self.space.clone(),
        );
        let mut eval_rng = evaluation_rng(self.config.seed);
        for i in 1..=num_iter {
            let step = self.ask().and_then(|x| {
                let value = objective.evaluate(&x, &mut eval_rng)?;
                let obs = Observation::new(x.clone(), value, i as u64)?;
                self.tell(&x, value)?;
                Ok(obs)
            });
            match step.and_then(|obs| campaign.record(obs)) {
                Ok(()) => {}
                Err(e) => {
                    campaign.error = Some(e.to_string());
                    break;
                }
            }
        }
        Ok(campaign)
    }
}

/// Noise stream for a campaign; independent of the planner's own stream.
pub fn evaluation_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Builds the planner named in `config` and runs a campaign on `objective`.
pub fn optimize(config: &PlannerConfig, objective: &dyn Objective, num_iter: usize) -> Result<Campaign> {
    let mut planner = Planner::new(config.clone(), objective.space().clone())?;
    planner.optimize(objective, num_iter)
}

/// Smallest `levels` with `levels^dim >= n`.
pub(crate) fn ceil_root(n: usize, dim: usize) -> usize {
    let mut levels = 1usize;
    while levels
        .checked_pow(dim as u32)
        .is_some_and(|total| total < n)
    {
        levels += 1;
    }
    levels
}

#[cfg(test)]
mod tests;
