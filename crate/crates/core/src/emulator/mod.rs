//! Probabilistic surrogates of tabular datasets: deep ensembles of small
//! feed-forward networks plus a homoscedastic residual term.

mod dataset;
mod metrics;
mod network;

use std::borrow::Borrow;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dataset::{folds, split, DatasetMeta, DatasetTable, Split, META_SUFFIX, MIN_ROWS};
pub use metrics::{average_ranks, metrics, r2, rmse, spearman, Metrics};
pub use network::{Activation, Layer, Network};

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::space::{Goal, ParamDef, ParamSpace, ParamVector};

/// Spearman ρ an emulator must reach on both train and test data to be usable.
pub const ACCEPTANCE_RHO: f64 = 0.90;
pub const FORMAT_NAME: &str = "noisybench-emulator";
pub const FORMAT_VERSION: u32 = 1;

/// Maps the network's raw output onto the target's physical range.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OutputTransform {
    #[default]
    Identity,
    /// Strictly positive predictions through a softplus.
    Positive,
    /// Predictions inside `(lo, hi)` through a logistic.
    Bounded { lo: f64, hi: f64 },
}

impl fmt::Display for OutputTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputTransform::Identity => f.write_str("identity"),
            OutputTransform::Positive => f.write_str("positive"),
            OutputTransform::Bounded { lo, hi } => write!(f, "bounded:{lo},{hi}"),
        }
    }
}

impl FromStr for OutputTransform {
    type Err = Error;

    /// `identity`, `positive` or `bounded:LO,HI`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown output transform `{s}` (identity, positive, bounded:LO,HI)"));
        match s.split_once(':') {
            None if s.eq_ignore_ascii_case("identity") => Ok(OutputTransform::Identity),
            None if s.eq_ignore_ascii_case("positive") => Ok(OutputTransform::Positive),
            Some((kind, range)) if kind.eq_ignore_ascii_case("bounded") => {
                let (lo, hi) = range.split_once(',').ok_or_else(bad)?;
                let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
                Ok(OutputTransform::Bounded { lo, hi })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmulatorConfig {
    pub hidden_depth: usize,
    pub hidden_width: usize,
    pub activation: Activation,
    pub output: OutputTransform,
    pub members: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    /// Epochs without a validation improvement before training stops.
    pub patience: usize,
    pub bootstrap: bool,
    pub train_fraction: f64,
    /// Seeds the split, the folds, initialization and resampling.
    pub seed: u64,
}

impl Default for EmulatorConfig {
    fn default() -> Self {
        EmulatorConfig {
            hidden_depth: 3,
            hidden_width: 48,
            activation: Activation::Softplus,
            output: OutputTransform::Identity,
            members: 5,
            epochs: 2000,
            learning_rate: 1e-3,
            momentum: 0.9,
            batch_size: 2,
            patience: 50,
            bootstrap: true,
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

impl EmulatorConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.members < 1 {
            return fail("an ensemble needs at least one member".into());
        }
        if self.hidden_depth > 0 && self.hidden_width < 1 {
            return fail("hidden_width must be >= 1".into());
        }
        if self.epochs < 1 || self.batch_size < 1 {
            return fail("epochs and batch_size must be >= 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate must be > 0, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return fail(format!("momentum must lie in [0, 1), got {}", self.momentum));
        }
        if let OutputTransform::Bounded { lo, hi } = self.output {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return fail(format!("bounded output needs finite lo < hi, got ({lo}, {hi})"));
            }
        }
        Ok(())
    }
}

/// Per-feature and target standardization statistics of the training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub x_mean: Vec<f64>,
    pub x_std: Vec<f64>,
    pub y_mean: f64,
    pub y_std: f64,
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, if var > 0.0 { var.sqrt() } else { 1.0 })
}

impl Normalization {
    fn fit(table: &DatasetTable, rows: &[usize]) -> Self {
        let (x_mean, x_std) = (0..table.dim())
            .map(|k| mean_std(rows.iter().map(|i| table.features(*i)[k])))
            .unzip();
        let (y_mean, y_std) = mean_std(rows.iter().map(|i| table.target(*i)));
        Normalization {
            x_mean,
            x_std,
            y_mean,
            y_std,
        }
    }

    fn input(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.x_mean.iter().zip(&self.x_std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Training-space target and the raw-output map back to physical units.
    fn target(&self, y: f64, out: OutputTransform) -> f64 {
        match out {
            OutputTransform::Identity => (y - self.y_mean) / self.y_std,
            OutputTransform::Positive => y / self.y_std,
            OutputTransform::Bounded { lo, hi } => (y - lo) / (hi - lo),
        }
    }

    /// Prediction in training space and its derivative, from raw output `z`.
    fn link(z: f64, out: OutputTransform) -> (f64, f64) {
        match out {
            OutputTransform::Identity => (z, 1.0),
            OutputTransform::Positive => (network::softplus(z), network::sigmoid(z)),
            OutputTransform::Bounded { .. } => {
                let s = network::sigmoid(z);
                (s, s * (1.0 - s))
            }
        }
    }

    fn output(&self, z: f64, out: OutputTransform) -> f64 {
        let (g, _) = Self::link(z, out);
        match out {
            OutputTransform::Identity => self.y_mean + self.y_std * g,
            OutputTransform::Positive => self.y_std * g,
            OutputTransform::Bounded { lo, hi } => lo + (hi - lo) * g,
        }
    }
}

fn check_targets(table: &DatasetTable, rows: &[usize], out: OutputTransform) -> Result<()> {
    for i in rows {
        let y = table.target(*i);
        let ok = match out {
            OutputTransform::Identity => true,
            OutputTransform::Positive => y >= 0.0,
            OutputTransform::Bounded { lo, hi } => (lo..=hi).contains(&y),
        };
        if !ok {
            return Err(Error::Config(format!(
                "target {y} in row {} is outside the codomain of the `{out}` output transform",
                i + 1
            )));
        }
    }
    Ok(())
}

fn member_rng(seed: u64, member: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(16 + member as u64);
    rng
}

fn mse(net: &Network, xs: &[Vec<f64>], ts: &[f64], rows: &[usize], out: OutputTransform) -> f64 {
    rows.iter()
        .map(|i| (Normalization::link(net.forward(&xs[*i]), out).0 - ts[*i]).powi(2))
        .sum::<f64>()
        / rows.len() as f64
}

/// Trains one ensemble member on `rows` with momentum SGD and early stopping.
fn train_member(
    xs: &[Vec<f64>],
    ts: &[f64],
    rows: &[usize],
    config: &EmulatorConfig,
    member: usize,
) -> Result<Network> {
    let mut rng = member_rng(config.seed, member);
    let dim = xs[rows[0]].len();
    let mut net = Network::new(dim, config.hidden_depth, config.hidden_width, config.activation, &mut rng);
    let (fit, valid): (Vec<usize>, Vec<usize>) = if config.bootstrap {
        let mut picked = vec![false; rows.len()];
        let fit: Vec<usize> = (0..rows.len())
            .map(|_| {
                let k = rng.random_range(0..rows.len());
                picked[k] = true;
                rows[k]
            })
            .collect();
        let oob: Vec<usize> = rows.iter().zip(&picked).filter(|(_, p)| !**p).map(|(r, _)| *r).collect();
        let valid = if oob.is_empty() { rows.to_vec() } else { oob };
        (fit, valid)
    } else {
        (rows.to_vec(), rows.to_vec())
    };

    let out = config.output;
    let mut velocity = net.zero_gradients();
    let mut order = fit.clone();
    let mut best = (mse(&net, xs, ts, &valid, out), net.clone());
    let mut since_best = 0;
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut grads = net.zero_gradients();
            let scale = 1.0 / batch.len() as f64;
            for i in batch {
                let t = ts[*i];
                let z = net.backprop(&xs[*i], &mut grads, |z| {
                    let (g, dg) = Normalization::link(z, out);
                    2.0 * (g - t) * dg * scale
                });
                epoch_loss += (Normalization::link(z, out).0 - t).powi(2);
            }
            let layers = velocity.weights.iter_mut().zip(velocity.bias.iter_mut());
            let grads = grads.weights.iter().zip(&grads.bias);
            for (((w, b), (vw, vb)), (gw, gb)) in net.params_mut().zip(layers).zip(grads) {
                for ((p, v), g) in w.iter_mut().zip(vw.iter_mut()).zip(gw) {
                    *v = config.momentum * *v - config.learning_rate * g;
                    *p += *v;
                }
                for ((p, v), g) in b.iter_mut().zip(vb.iter_mut()).zip(gb) {
                    *v = config.momentum * *v - config.learning_rate * g;
                    *p += *v;
                }
            }
        }
        if !epoch_loss.is_finite() {
            return Err(Error::Divergence(format!(
                "member {member}, epoch {epoch}: training loss {epoch_loss} (learning rate {})",
                config.learning_rate
            )));
        }
        let val = mse(&net, xs, ts, &valid, out);
        if val < best.0 {
            best = (val, net.clone());
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                log::debug!("member {member} stopped at epoch {epoch}, validation mse {}", best.0);
                break;
            }
        }
    }
    Ok(best.1)
}

/// Normalization plus trained members for the given training rows.
fn fit_ensemble(table: &DatasetTable, rows: &[usize], config: &EmulatorConfig) -> Result<(Normalization, Vec<Network>)> {
    check_targets(table, rows, config.output)?;
    let norm = Normalization::fit(table, rows);
    let xs: Vec<Vec<f64>> = (0..table.len()).map(|i| norm.input(table.features(i))).collect();
    let ts: Vec<f64> = (0..table.len()).map(|i| norm.target(table.target(i), config.output)).collect();
    let members = (0..config.members)
        .into_par_iter()
        .map(|m| train_member(&xs, &ts, rows, config, m))
        .collect::<Result<Vec<_>>>()?;
    Ok((norm, members))
}

fn ensemble_mean(norm: &Normalization, members: &[Network], out: OutputTransform, x: &[f64]) -> f64 {
    let input = norm.input(x);
    members.iter().map(|m| norm.output(m.forward(&input), out)).sum::<f64>() / members.len() as f64
}

/// A trained emulator. Immutable once built; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmulatorModel {
    pub name: String,
    pub space: ParamSpace,
    pub target_name: String,
    pub goal: Goal,
    pub config: EmulatorConfig,
    pub normalization: Normalization,
    pub members: Vec<Network>,
    pub residual_sigma: f64,
    pub train_metrics: Metrics,
    pub test_metrics: Metrics,
    pub split_seed: u64,
    pub accepted: bool,
}

#[derive(Debug, Serialize)]
struct Envelope<'a> {
    format: &'a str,
    version: u32,
    model: &'a EmulatorModel,
}

fn is_accepted(train: &Metrics, test: &Metrics) -> bool {
    train.spearman >= ACCEPTANCE_RHO && test.spearman >= ACCEPTANCE_RHO
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

impl EmulatorModel {
    pub fn train(table: &DatasetTable, config: &EmulatorConfig) -> Result<Self> {
        config.validate()?;
        let parts = split(table.len(), config.train_fraction, config.seed)?;
        let (normalization, members) = fit_ensemble(table, &parts.train, config)?;
        let mut model = EmulatorModel {
            name: table.name.clone(),
            space: table.space.clone(),
            target_name: table.target_name.clone(),
            goal: table.goal,
            config: config.clone(),
            normalization,
            members,
            residual_sigma: 0.0,
            train_metrics: Metrics { r2: 0.0, spearman: 0.0, rmse: 0.0 },
            test_metrics: Metrics { r2: 0.0, spearman: 0.0, rmse: 0.0 },
            split_seed: config.seed,
            accepted: false,
        };
        let (train, test, residuals) = model.score(table, &parts)?;
        model.train_metrics = train;
        model.test_metrics = test;
        model.residual_sigma = sample_std(&residuals);
        model.accepted = is_accepted(&train, &test);
        Ok(model)
    }

    /// Train and test metrics plus test residuals for a given partition.
    fn score(&self, table: &DatasetTable, parts: &Split) -> Result<(Metrics, Metrics, Vec<f64>)> {
        let predict = |rows: &[usize]| -> Vec<f64> { rows.iter().map(|i| self.predict_mean(table.features(*i))).collect() };
        let truth = |rows: &[usize]| -> Vec<f64> { rows.iter().map(|i| table.target(*i)).collect() };
        let (p_train, t_train) = (predict(&parts.train), truth(&parts.train));
        let (p_test, t_test) = (predict(&parts.test), truth(&parts.test));
        let residuals = p_test.iter().zip(&t_test).map(|(p, t)| t - p).collect();
        Ok((metrics(&p_train, &t_train)?, metrics(&p_test, &t_test)?, residuals))
    }

    /// Recomputes the stored metrics from the dataset and the stored split seed.
    pub fn recompute_metrics(&self, table: &DatasetTable) -> Result<(Metrics, Metrics)> {
        let parts = split(table.len(), self.config.train_fraction, self.split_seed)?;
        let (train, test, _) = self.score(table, &parts)?;
        Ok((train, test))
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn predict_mean(&self, x: &[f64]) -> f64 {
        ensemble_mean(&self.normalization, &self.members, self.config.output, x)
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Contract(format!(
                "emulator `{}` takes {} parameters, got {}",
                self.name,
                self.dim(),
                x.len()
            )));
        }
        if !self.space.contains(x) {
            return Err(Error::Domain(format!(
                "{x:?} lies outside the training domain of emulator `{}`",
                self.name
            )));
        }
        Ok(())
    }

    /// Ensemble-mean prediction; a pure function of the model and `x`.
    pub fn emulate(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.predict_mean(x))
    }

    /// One predictive draw: a uniformly chosen member plus Gaussian residual noise.
    pub fn emulate_stochastic(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<f64> {
        self.check_input(x)?;
        let k = rng.random_range(0..self.members.len());
        let input = self.normalization.input(x);
        let member = self.normalization.output(self.members[k].forward(&input), self.config.output);
        let z: f64 = StandardNormal.sample(rng);
        Ok(member + self.residual_sigma * z)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&Envelope {
            format: FORMAT_NAME,
            version: FORMAT_VERSION,
            model: self,
        })?;
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |e: serde_json::Error| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        };
        let mut value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
        let bad = |m: &str| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: m.to_string(),
        };
        if value.get("format").and_then(|f| f.as_str()) != Some(FORMAT_NAME) {
            return Err(bad("not an emulator file"));
        }
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| bad("missing format version"))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(Error::Version {
                found: version.min(u64::from(u32::MAX)) as u32,
                supported: FORMAT_VERSION,
            });
        }
        let model: EmulatorModel = serde_json::from_value(value["model"].take()).map_err(parse_err)?;
        if model.members.is_empty() || !model.residual_sigma.is_finite() || model.residual_sigma < 0.0 {
            return Err(bad("emulator has no members or an invalid residual_sigma"));
        }
        if is_accepted(&model.train_metrics, &model.test_metrics) != model.accepted {
            return Err(bad("stored `accepted` flag disagrees with the stored metrics"));
        }
        Ok(model)
    }

    /// View whose `evaluate` is the deterministic ensemble mean.
    pub fn deterministic(&self) -> Deterministic<&Self> {
        Deterministic(self)
    }
}

impl Objective for EmulatorModel {
    fn id(&self) -> String {
        format!("emulator:{}", self.name)
    }

    fn space(&self) -> &ParamSpace {
        &self.space
    }

    fn clean(&self, x: &ParamVector) -> Result<f64> {
        self.emulate(x)
    }

    fn evaluate(&self, x: &ParamVector, rng: &mut dyn RngCore) -> Result<f64> {
        self.emulate_stochastic(x, rng)
    }
}

/// An emulator evaluated without predictive noise, either borrowed or owned.
#[derive(Debug, Clone, Copy)]
pub struct Deterministic<M>(pub M);

impl<M: Borrow<EmulatorModel> + Send + Sync> Objective for Deterministic<M> {
    fn id(&self) -> String {
        format!("emulator:{}:mean", self.0.borrow().name)
    }

    fn space(&self) -> &ParamSpace {
        &self.0.borrow().space
    }

    fn clean(&self, x: &ParamVector) -> Result<f64> {
        self.0.borrow().emulate(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub size: usize,
    /// `None` when the fold failed to train or its metrics are undefined.
    pub metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub folds: Vec<FoldReport>,
    /// Aggregates over the folds that trained successfully.
    pub mean: Option<Metrics>,
    pub std: Option<Metrics>,
}

/// k-fold cross-validation on the training portion of the configured split.
pub fn cross_validate(table: &DatasetTable, config: &EmulatorConfig, k: usize) -> Result<CvReport> {
    config.validate()?;
    let parts = split(table.len(), config.train_fraction, config.seed)?;
    let fold_rows = folds(&parts.train, k, config.seed)?;
    let mut reports = Vec::with_capacity(k);
    for (f, held_out) in fold_rows.iter().enumerate() {
        let fit_rows: Vec<usize> = fold_rows
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        let outcome = fit_ensemble(table, &fit_rows, config).and_then(|(norm, members)| {
            let pred: Vec<f64> = held_out
                .iter()
                .map(|i| ensemble_mean(&norm, &members, config.output, table.features(*i)))
                .collect();
            let truth: Vec<f64> = held_out.iter().map(|i| table.target(*i)).collect();
            metrics(&pred, &truth)
        });
        if let Err(e) = &outcome {
            log::warn!("cross-validation fold {f} did not converge: {e}");
        }
        reports.push(FoldReport {
            fold: f,
            size: held_out.len(),
            error: outcome.as_ref().err().map(|e| e.to_string()),
            metrics: outcome.ok(),
        });
    }
    let ok: Vec<Metrics> = reports.iter().filter_map(|r| r.metrics).collect();
    let summarize = |field: fn(&Metrics) -> f64| -> (f64, f64) {
        let xs: Vec<f64> = ok.iter().map(field).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        (m, sample_std(&xs))
    };
    let (mean, std) = if ok.is_empty() {
        (None, None)
    } else {
        let (r2m, r2s) = summarize(|m| m.r2);
        let (rhom, rhos) = summarize(|m| m.spearman);
        let (em, es) = summarize(|m| m.rmse);
        (
            Some(Metrics { r2: r2m, spearman: rhom, rmse: em }),
            Some(Metrics { r2: r2s, spearman: rhos, rmse: es }),
        )
    };
    Ok(CvReport {
        k,
        folds: reports,
        mean,
        std,
    })
}

/// Closed-form response surfaces for generating test datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticKind {
    /// `sin(2π x1) + 0.5 x2` on the unit square.
    Sine,
    /// `2 x1 - x2` on the unit square.
    Linear,
}

impl SyntheticKind {
    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::Sine => "sine",
            SyntheticKind::Linear => "linear",
        }
    }

    pub fn response(self, x: &[f64]) -> f64 {
        match self {
            SyntheticKind::Sine => (2.0 * std::f64::consts::PI * x[0]).sin() + 0.5 * x[1],
            SyntheticKind::Linear => 2.0 * x[0] - x[1],
        }
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sine" | "sin" => Ok(SyntheticKind::Sine),
            "linear" => Ok(SyntheticKind::Linear),
            _ => Err(Error::Config(format!("unknown synthetic dataset `{s}` (sine, linear)"))),
        }
    }
}

/// `n` uniform samples of `kind` on the unit square with Gaussian noise of
/// standard deviation `noise_sd`.
pub fn synthetic_dataset(kind: SyntheticKind, n: usize, noise_sd: f64, seed: u64) -> Result<DatasetTable> {
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::Config(format!("noise must be finite and >= 0, got {noise_sd}")));
    }
    let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            let x = [rng.random::<f64>(), rng.random::<f64>()];
            vec![x[0], x[1], kind.response(&x) + noise.sample(&mut rng)]
        })
        .collect();
    let space = ParamSpace::new(vec![ParamDef::new("x1", 0.0, 1.0), ParamDef::new("x2", 0.0, 1.0)])?;
    DatasetTable::new(kind.name(), space, "y", Goal::Minimize, rows)
}

/// `n` uniform samples of `objective`, noise included, as a dataset over its
/// own space with target column `y`.
pub fn sample_dataset(objective: &dyn Objective, name: &str, n: usize, seed: u64) -> Result<DatasetTable> {
    let space = objective.space();
    let mut points = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = crate::planners::evaluation_rng(seed);
    let rows = (0..n)
        .map(|_| {
            let u: Vec<f64> = (0..space.dim()).map(|_| points.random()).collect();
            let x = space.lift_from_unit(&u)?;
            let y = objective.evaluate(&x, &mut noise)?;
            let mut row = x.into_inner();
            row.push(y);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    DatasetTable::new(name, space.clone(), "y", Goal::Minimize, rows)
}
