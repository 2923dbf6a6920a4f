//! Analytical benchmark surfaces.
//!
//! Every surface is queried on the unit hypercube `[0, 1]^d` and lifts the
//! point to its canonical domain internally. All surfaces are minimization
//! targets.

pub mod formulas;
pub mod mixture;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::objective::Objective;
use crate::space::{ParamSpace, ParamVector};

pub use mixture::{build_mixture, MixtureModel};

pub const DEFAULT_MICHALEWICZ_M: f64 = 10.0;
pub const DEFAULT_DISCRETE_LEVELS: usize = 16;
pub const DEFAULT_FUNNEL_LEVELS: usize = 8;
/// How much tighter the narrow funnel is than the linear one, around the center.
const NARROW_FUNNEL_ZOOM: f64 = 4.0;
/// Points per axis of the grid used to find the value range of a quantized surface.
const PROBE_POINTS_PER_AXIS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceKind {
    AckleyPath,
    Branin,
    Dejong,
    HyperEllipsoid,
    Levy,
    Michalewicz,
    Rastrigin,
    Rosenbrock,
    Schwefel,
    StyblinskiTang,
    Zakharov,
    LinearFunnel,
    NarrowFunnel,
    DiscreteAckley,
    DiscreteDoubleWell,
    DiscreteMichalewicz,
    GaussianMixture,
}

impl SurfaceKind {
    pub const ALL: [SurfaceKind; 17] = [
        SurfaceKind::AckleyPath,
        SurfaceKind::Branin,
        SurfaceKind::Dejong,
        SurfaceKind::HyperEllipsoid,
        SurfaceKind::Levy,
        SurfaceKind::Michalewicz,
        SurfaceKind::Rastrigin,
        SurfaceKind::Rosenbrock,
        SurfaceKind::Schwefel,
        SurfaceKind::StyblinskiTang,
        SurfaceKind::Zakharov,
        SurfaceKind::LinearFunnel,
        SurfaceKind::NarrowFunnel,
        SurfaceKind::DiscreteAckley,
        SurfaceKind::DiscreteDoubleWell,
        SurfaceKind::DiscreteMichalewicz,
        SurfaceKind::GaussianMixture,
    ];

    pub const CONTINUOUS: [SurfaceKind; 11] = [
        SurfaceKind::AckleyPath,
        SurfaceKind::Branin,
        SurfaceKind::Dejong,
        SurfaceKind::HyperEllipsoid,
        SurfaceKind::Levy,
        SurfaceKind::Michalewicz,
        SurfaceKind::Rastrigin,
        SurfaceKind::Rosenbrock,
        SurfaceKind::Schwefel,
        SurfaceKind::StyblinskiTang,
        SurfaceKind::Zakharov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::AckleyPath => "AckleyPath",
            SurfaceKind::Branin => "Branin",
            SurfaceKind::Dejong => "Dejong",
            SurfaceKind::HyperEllipsoid => "HyperEllipsoid",
            SurfaceKind::Levy => "Levy",
            SurfaceKind::Michalewicz => "Michalewicz",
            SurfaceKind::Rastrigin => "Rastrigin",
            SurfaceKind::Rosenbrock => "Rosenbrock",
            SurfaceKind::Schwefel => "Schwefel",
            SurfaceKind::StyblinskiTang => "StyblinskiTang",
            SurfaceKind::Zakharov => "Zakharov",
            SurfaceKind::LinearFunnel => "LinearFunnel",
            SurfaceKind::NarrowFunnel => "NarrowFunnel",
            SurfaceKind::DiscreteAckley => "DiscreteAckley",
            SurfaceKind::DiscreteDoubleWell => "DiscreteDoubleWell",
            SurfaceKind::DiscreteMichalewicz => "DiscreteMichalewicz",
            SurfaceKind::GaussianMixture => "GaussianMixture",
        }
    }

    pub fn is_continuous(self) -> bool {
        Self::CONTINUOUS.contains(&self)
    }

    /// Canonical domain per dimension for the closed-form kinds.
    pub fn domain(self, dim: usize) -> Vec<(f64, f64)> {
        let same = |lo, hi| vec![(lo, hi); dim];
        match self {
            SurfaceKind::AckleyPath | SurfaceKind::DiscreteAckley => same(-32.0, 32.0),
            SurfaceKind::Branin => vec![(-5.0, 10.0), (0.0, 15.0)],
            SurfaceKind::Dejong
            | SurfaceKind::HyperEllipsoid
            | SurfaceKind::Rastrigin
            | SurfaceKind::StyblinskiTang
            | SurfaceKind::LinearFunnel
            | SurfaceKind::NarrowFunnel => same(-5.0, 5.0),
            SurfaceKind::Levy => same(-10.0, 10.0),
            SurfaceKind::Michalewicz | SurfaceKind::DiscreteMichalewicz => same(0.0, PI),
            SurfaceKind::Rosenbrock | SurfaceKind::DiscreteDoubleWell => same(-2.0, 2.0),
            SurfaceKind::Schwefel => same(-500.0, 500.0),
            SurfaceKind::Zakharov => same(-5.0, 10.0),
            SurfaceKind::GaussianMixture => same(0.0, 1.0),
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        SurfaceKind::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase() == key)
            .or(match key.as_str() {
                "ackley" => Some(SurfaceKind::AckleyPath),
                "mixture" | "gmm" => Some(SurfaceKind::GaussianMixture),
                _ => None,
            })
            .ok_or_else(|| Error::Config(format!("unknown surface `{s}`")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceExtra {
    /// Michalewicz steepness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Gaussian-mixture seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_components: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<bool>,
    /// Quantization levels; also turns any continuous kind into a piece-wise constant one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    #[serde(default = "default_dim")]
    pub param_dim: usize,
    #[serde(default)]
    pub extra: SurfaceExtra,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
}

fn default_dim() -> usize {
    2
}

impl SurfaceSpec {
    pub fn new(kind: SurfaceKind, param_dim: usize) -> Self {
        SurfaceSpec {
            kind,
            param_dim,
            extra: SurfaceExtra::default(),
            noise: None,
        }
    }

    /// A mountain-named mixture preset such as `everest`.
    pub fn preset(name: &str) -> Result<Self> {
        let seed = mixture::preset_seed(name)
            .ok_or_else(|| Error::Config(format!("unknown mixture preset `{name}`")))?;
        let mut spec = SurfaceSpec::new(SurfaceKind::GaussianMixture, 2);
        spec.extra.seed = Some(seed);
        Ok(spec)
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn with_levels(mut self, n_levels: usize) -> Self {
        self.extra.n_levels = Some(n_levels);
        self
    }

    pub fn michalewicz_m(&self) -> f64 {
        self.extra.m.unwrap_or(DEFAULT_MICHALEWICZ_M)
    }

    pub fn mixture_seed(&self) -> u64 {
        self.extra.seed.unwrap_or(0)
    }

    pub fn mixture_components(&self) -> usize {
        self.extra.n_components.unwrap_or(mixture::DEFAULT_COMPONENTS)
    }

    pub fn n_levels(&self) -> Option<usize> {
        self.extra.n_levels.or(match self.kind {
            SurfaceKind::LinearFunnel | SurfaceKind::NarrowFunnel => Some(DEFAULT_FUNNEL_LEVELS),
            SurfaceKind::DiscreteAckley
            | SurfaceKind::DiscreteDoubleWell
            | SurfaceKind::DiscreteMichalewicz => Some(DEFAULT_DISCRETE_LEVELS),
            _ => None,
        })
    }

    /// Canonical identifier, also accepted by `FromStr` (e.g. `dejong:d=2`).
    pub fn id(&self) -> String {
        let mut opts = vec![format!("d={}", self.param_dim)];
        let base = match self.kind {
            SurfaceKind::GaussianMixture => {
                let seed = self.mixture_seed();
                let default_shape = self.extra.n_components.is_none() && self.extra.diagonal.is_none();
                match mixture::preset_name(seed) {
                    Some(name) if default_shape => name.to_string(),
                    _ => {
                        opts.push(format!("seed={seed}"));
                        opts.push(format!("components={}", self.mixture_components()));
                        if self.extra.diagonal.unwrap_or(false) {
                            opts.push("diagonal=true".into());
                        }
                        "gaussianmixture".into()
                    }
                }
            }
            kind => kind.name().to_ascii_lowercase(),
        };
        if matches!(self.kind, SurfaceKind::Michalewicz | SurfaceKind::DiscreteMichalewicz)
            && self.extra.m.is_some()
        {
            opts.push(format!("m={}", self.michalewicz_m()));
        }
        if let Some(levels) = self.extra.n_levels {
            opts.push(format!("levels={levels}"));
        }
        let mut id = format!("{base}:{}", opts.join(","));
        if let Some(noise) = &self.noise {
            id.push('+');
            id.push_str(&noise.to_string());
        }
        id
    }
}

/// Parses `<kind>[:d=<n>,m=<v>,seed=<s>,components=<c>,diagonal=<b>,levels=<l>][+<noise>]`.
///
/// Mixture presets are accepted by mountain name, e.g. `everest` or `k2:d=3`.
impl FromStr for SurfaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, noise) = match s.split_once('+') {
            Some((b, n)) => (b, Some(n.parse::<NoiseSpec>()?)),
            None => (s, None),
        };
        let (name, opts) = body.split_once(':').unwrap_or((body, ""));
        let mut spec = match mixture::preset_seed(name) {
            Some(_) => SurfaceSpec::preset(name)?,
            None => SurfaceSpec::new(name.parse()?, 2),
        };
        for opt in opts.split(',').filter(|o| !o.is_empty()) {
            let (key, value) = opt
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("surface option `{opt}` must be key=value")))?;
            let bad = |e: &dyn fmt::Display| Error::Config(format!("bad value for `{key}`: {e}"));
            match key {
                "d" | "dim" => spec.param_dim = value.parse().map_err(|e| bad(&e))?,
                "m" => spec.extra.m = Some(value.parse().map_err(|e| bad(&e))?),
                "seed" => spec.extra.seed = Some(value.parse().map_err(|e| bad(&e))?),
                "components" | "n_components" => {
                    spec.extra.n_components = Some(value.parse().map_err(|e| bad(&e))?)
                }
                "diagonal" => spec.extra.diagonal = Some(value.parse().map_err(|e| bad(&e))?),
                "levels" | "n_levels" => spec.extra.n_levels = Some(value.parse().map_err(|e| bad(&e))?),
                _ => return Err(Error::Config(format!("unknown surface option `{key}`"))),
            }
        }
        spec.noise = noise;
        Ok(spec)
    }
}

#[derive(Debug, Clone)]
enum Base {
    Formula(SurfaceKind),
    Mixture(MixtureModel),
}

#[derive(Debug, Clone, Copy)]
struct Quantizer {
    lo: f64,
    hi: f64,
    levels: usize,
}

impl Quantizer {
    fn apply(&self, v: f64) -> f64 {
        let width = self.hi - self.lo;
        if !(width > 0.0) {
            return self.lo;
        }
        let bin = ((v - self.lo) / width * self.levels as f64).floor();
        let bin = bin.clamp(0.0, (self.levels - 1) as f64);
        self.lo + bin * width / self.levels as f64
    }
}

/// A constructed, immutable surface ready for evaluation.
#[derive(Debug, Clone)]
pub struct Surface {
    spec: SurfaceSpec,
    space: ParamSpace,
    domain: Vec<(f64, f64)>,
    base: Base,
    quantizer: Option<Quantizer>,
    zoom: f64,
}

impl Surface {
    pub fn new(spec: SurfaceSpec) -> Result<Self> {
        let d = spec.param_dim;
        if d < 1 {
            return Err(Error::Config("param_dim must be >= 1".into()));
        }
        if spec.kind == SurfaceKind::Branin && d != 2 {
            return Err(Error::Config(format!("Branin is two-dimensional, got param_dim={d}")));
        }
        if let Some(noise) = &spec.noise {
            noise.validate()?;
        }
        let m = spec.michalewicz_m();
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Config(format!("Michalewicz m must be > 0, got {m}")));
        }
        let base = match spec.kind {
            SurfaceKind::GaussianMixture => Base::Mixture(build_mixture(
                spec.mixture_seed(),
                d,
                spec.mixture_components(),
                spec.extra.diagonal.unwrap_or(false),
            )?),
            SurfaceKind::LinearFunnel | SurfaceKind::NarrowFunnel => {
                Base::Formula(SurfaceKind::HyperEllipsoid)
            }
            SurfaceKind::DiscreteAckley => Base::Formula(SurfaceKind::AckleyPath),
            SurfaceKind::DiscreteMichalewicz => Base::Formula(SurfaceKind::Michalewicz),
            kind => Base::Formula(kind),
        };
        let zoom = if spec.kind == SurfaceKind::NarrowFunnel {
            NARROW_FUNNEL_ZOOM
        } else {
            1.0
        };
        let mut surface = Surface {
            domain: spec.kind.domain(d),
            space: ParamSpace::unit(d)?,
            spec,
            base,
            quantizer: None,
            zoom,
        };
        if let Some(levels) = surface.spec.n_levels() {
            if levels < 2 {
                return Err(Error::Config(format!("n_levels must be >= 2, got {levels}")));
            }
            let (lo, hi) = surface.probe_range();
            surface.quantizer = Some(Quantizer { lo, hi, levels });
        }
        Ok(surface)
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.param_dim
    }

    pub fn mixture(&self) -> Option<&MixtureModel> {
        match &self.base {
            Base::Mixture(m) => Some(m),
            Base::Formula(_) => None,
        }
    }

    /// Physical point the unit coordinates map to.
    pub fn lift(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.domain)
            .map(|(t, (lo, hi))| {
                let t = (0.5 + self.zoom * (t - 0.5)).clamp(0.0, 1.0);
                lo + t * (hi - lo)
            })
            .collect()
    }

    fn raw(&self, u: &[f64]) -> f64 {
        match &self.base {
            Base::Mixture(m) => m.value(u),
            Base::Formula(kind) => {
                let x = self.lift(u);
                match kind {
                    SurfaceKind::AckleyPath => formulas::ackley_path(&x),
                    SurfaceKind::Branin => formulas::branin(&x),
                    SurfaceKind::Dejong => formulas::dejong(&x),
                    SurfaceKind::HyperEllipsoid => formulas::hyper_ellipsoid(&x),
                    SurfaceKind::Levy => formulas::levy(&x),
                    SurfaceKind::Michalewicz => formulas::michalewicz(&x, self.spec.michalewicz_m()),
                    SurfaceKind::Rastrigin => formulas::rastrigin(&x),
                    SurfaceKind::Rosenbrock => formulas::rosenbrock(&x),
                    SurfaceKind::Schwefel => formulas::schwefel(&x),
                    SurfaceKind::StyblinskiTang => formulas::styblinski_tang(&x),
                    SurfaceKind::Zakharov => formulas::zakharov(&x),
                    SurfaceKind::DiscreteDoubleWell => formulas::double_well(&x),
                    other => unreachable!("{other} is resolved to a base formula at construction"),
                }
            }
        }
    }

    fn probe_range(&self) -> (f64, f64) {
        let d = self.dim();
        let n = PROBE_POINTS_PER_AXIS;
        let axis = |i: usize| i as f64 / (n - 1) as f64;
        let total = n.pow(d.min(2) as u32);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut u = vec![0.0; d];
        for idx in 0..total {
            let (a, b) = (idx % n, idx / n);
            for (k, uk) in u.iter_mut().enumerate() {
                *uk = axis(if k % 2 == 0 { a } else { b });
            }
            let v = self.raw(&u);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::Contract(format!(
                "{} expects {} coordinates, got {}",
                self.spec.kind,
                self.dim(),
                u.len()
            )));
        }
        if let Some(bad) = u.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::Domain(format!("coordinate {bad} outside [0, 1]")));
        }
        Ok(())
    }

    /// Noise-free value at unit point `u`.
    pub fn value(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        let v = self.raw(u);
        Ok(match &self.quantizer {
            Some(q) => q.apply(v),
            None => v,
        })
    }

    /// Value at `u`, perturbed by the spec's noise if any.
    pub fn evaluate(&self, u: &[f64], rng: &mut dyn RngCore) -> Result<f64> {
        let v = self.value(u)?;
        match &self.spec.noise {
            Some(noise) => Ok(v + noise.sample(rng)?),
            None => Ok(v),
        }
    }

    pub fn evaluate_batch(&self, points: &[Vec<f64>], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        if let Some(p) = points.iter().find(|p| p.len() != self.dim()) {
            return Err(Error::Contract(format!(
                "ragged batch: row of length {} in a {}-dimensional batch",
                p.len(),
                self.dim()
            )));
        }
        points.iter().map(|u| self.evaluate(u, rng)).collect()
    }
}

impl Objective for Surface {
    fn id(&self) -> String {
        self.spec.id()
    }

    fn space(&self) -> &ParamSpace {
        &self.space
    }

    fn clean(&self, x: &ParamVector) -> Result<f64> {
        self.value(x)
    }

    fn noise(&self) -> Option<&NoiseSpec> {
        self.spec.noise.as_ref()
    }
}

/// Quantizes `base` into `n_levels` uniform value bins.
pub fn discretize(base: &SurfaceSpec, n_levels: usize) -> Result<Surface> {
    Surface::new(base.clone().with_levels(n_levels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eval(kind: SurfaceKind, u: &[f64]) -> f64 {
        Surface::new(SurfaceSpec::new(kind, u.len()))
            .unwrap()
            .value(u)
            .unwrap()
    }

    fn unit_of(kind: SurfaceKind, x: &[f64]) -> Vec<f64> {
        kind.domain(x.len())
            .iter()
            .zip(x)
            .map(|((lo, hi), v)| (v - lo) / (hi - lo))
            .collect()
    }

    #[test]
    fn dejong_worked_example() {
        assert_eq!(eval(SurfaceKind::Dejong, &[0.5, 0.5]), 0.0);
        let v = eval(SurfaceKind::Dejong, &[0.75, 0.75]);
        assert!((v - 2.0 * 2.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn anchor_values() {
        assert_eq!(eval(SurfaceKind::Rastrigin, &[0.5, 0.5]), 0.0);
        assert!(eval(SurfaceKind::Levy, &unit_of(SurfaceKind::Levy, &[1.0, 1.0])).abs() < 1e-15);
        assert_eq!(eval(SurfaceKind::Zakharov, &unit_of(SurfaceKind::Zakharov, &[0.0, 0.0])), 0.0);
        assert_eq!(eval(SurfaceKind::Schwefel, &[0.5, 0.5]), 0.0);
        assert!((eval(SurfaceKind::HyperEllipsoid, &[0.6, 0.6]) - 3.0).abs() < 1e-12);
        let b = eval(SurfaceKind::Branin, &unit_of(SurfaceKind::Branin, &[PI, 2.275]));
        assert!((b - 0.397887).abs() < 1e-4, "branin {b}");
        assert!(eval(SurfaceKind::Rosenbrock, &[0.75, 0.75]).abs() < 1e-15);
    }

    #[test]
    fn ackley_path_origin_uses_unnormalized_cosine_sum() {
        let v = eval(SurfaceKind::AckleyPath, &[0.5, 0.5]);
        assert!((v - (-20.0 - 2f64.exp() + 20.0 + std::f64::consts::E)).abs() < 1e-12);
        assert!((v + 4.6708).abs() < 1e-3);
    }

    #[test]
    fn branin_rejects_other_dimensions() {
        assert!(Surface::new(SurfaceSpec::new(SurfaceKind::Branin, 3)).is_err());
    }

    #[test]
    fn default_dimension_is_two() {
        let spec: SurfaceSpec = serde_json::from_str(r#"{"kind":"Rastrigin"}"#).unwrap();
        assert_eq!(spec.param_dim, 2);
        assert_eq!("rastrigin".parse::<SurfaceSpec>().unwrap().param_dim, 2);
    }

    #[test]
    fn domain_and_shape_errors() {
        let s = Surface::new(SurfaceSpec::new(SurfaceKind::Dejong, 2)).unwrap();
        assert!(matches!(s.value(&[0.5]), Err(Error::Contract(_))));
        assert!(matches!(s.value(&[0.5, 1.5]), Err(Error::Domain(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            s.evaluate_batch(&[vec![0.5, 0.5], vec![0.5]], &mut rng),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn batch_matches_pointwise() {
        let s = Surface::new(SurfaceSpec::new(SurfaceKind::Dejong, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = s.evaluate_batch(&[vec![0.5, 0.5], vec![0.75, 0.75]], &mut rng).unwrap();
        assert_eq!(out[0], 0.0);
        assert!((out[1] - 3.16227766).abs() < 1e-8);
        assert!(s.evaluate_batch(&[], &mut rng).unwrap().is_empty());
        let one = s.evaluate_batch(&[vec![0.2, 0.9]], &mut rng).unwrap();
        assert_eq!(one[0], s.value(&[0.2, 0.9]).unwrap());
    }

    #[test]
    fn quantized_output_has_few_levels() {
        for kind in [
            SurfaceKind::LinearFunnel,
            SurfaceKind::NarrowFunnel,
            SurfaceKind::DiscreteAckley,
            SurfaceKind::DiscreteDoubleWell,
            SurfaceKind::DiscreteMichalewicz,
        ] {
            let s = Surface::new(SurfaceSpec::new(kind, 2)).unwrap();
            let levels = s.spec().n_levels().unwrap();
            let mut seen = std::collections::BTreeSet::new();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..2000 {
                let u: Vec<f64> = (0..2).map(|_| rand::Rng::random(&mut rng)).collect();
                seen.insert(s.value(&u).unwrap().to_bits());
            }
            assert!(seen.len() <= levels, "{kind}: {} distinct values", seen.len());
            assert!(seen.len() > 1, "{kind} collapsed to one level");
        }
    }

    #[test]
    fn constant_base_quantizes_to_one_value() {
        // A single very wide component is nearly flat, but use the degenerate
        // quantizer directly for an exactly constant base.
        let q = Quantizer { lo: 2.0, hi: 2.0, levels: 2 };
        assert_eq!(q.apply(2.0), 2.0);
        assert_eq!(q.apply(5.0), 2.0);
    }

    #[test]
    fn narrow_funnel_is_flat_away_from_center() {
        let narrow = Surface::new(SurfaceSpec::new(SurfaceKind::NarrowFunnel, 2)).unwrap();
        let corner = narrow.value(&[0.0, 0.0]).unwrap();
        assert_eq!(narrow.value(&[0.1, 0.2]).unwrap(), corner);
        assert!(narrow.value(&[0.5, 0.5]).unwrap() < corner);
    }

    #[test]
    fn discretize_any_continuous_kind() {
        let s = discretize(&SurfaceSpec::new(SurfaceKind::Rastrigin, 2), 4).unwrap();
        assert!(discretize(&SurfaceSpec::new(SurfaceKind::Rastrigin, 2), 1).is_err());
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..50 {
            for j in 0..50 {
                seen.insert(s.value(&[i as f64 / 49.0, j as f64 / 49.0]).unwrap().to_bits());
            }
        }
        assert!(seen.len() <= 4);
    }

    #[test]
    fn spec_strings_round_trip() {
        for text in [
            "dejong:d=2",
            "michalewicz:d=3,m=12",
            "everest:d=2",
            "gaussianmixture:d=2,seed=5,components=3,diagonal=true",
            "rastrigin:d=2,levels=6+gaussian:0.5",
        ] {
            let spec: SurfaceSpec = text.parse().unwrap();
            assert_eq!(spec.id(), text);
            assert_eq!(spec.id().parse::<SurfaceSpec>().unwrap(), spec);
        }
        assert!("nosuch:d=2".parse::<SurfaceSpec>().is_err());
        assert!("dejong:q=2".parse::<SurfaceSpec>().is_err());
    }

    #[test]
    fn spec_json_shape() {
        let spec: SurfaceSpec = "michalewicz:d=2,m=12+gaussian:0.5".parse().unwrap();
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(v["kind"], "Michalewicz");
        assert_eq!(v["param_dim"], 2);
        assert_eq!(v["extra"]["m"], 12.0);
        assert_eq!(v["noise"]["kind"], "gaussian");
        assert_eq!(serde_json::from_value::<SurfaceSpec>(v).unwrap(), spec);
    }

    #[test]
    fn noise_free_evaluation_is_pure() {
        let s = Surface::new(SurfaceSpec::preset("everest").unwrap()).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(1);
        let mut r2 = ChaCha8Rng::seed_from_u64(2);
        let u = [0.31, 0.77];
        assert_eq!(
            s.evaluate(&u, &mut r1).unwrap().to_bits(),
            s.evaluate(&u, &mut r2).unwrap().to_bits()
        );
    }
}
