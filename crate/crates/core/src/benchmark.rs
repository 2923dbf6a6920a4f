//! Campaign orchestration: planner × target × repeat grids, best-so-far
//! statistics at fixed checkpoints, and the random-search baseline.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::campaign::Campaign;
use crate::database::Database;
use crate::emulator::{Deterministic, EmulatorModel};
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::objective::{attach, Objective};
use crate::planners::{optimize, PlannerConfig, PlannerKind};
use crate::space::Goal;
use crate::surfaces::{Surface, SurfaceSpec};

/// Evaluation counts at which best-so-far distributions are reported.
pub const CHECKPOINTS: [usize; 9] = [1, 3, 10, 30, 100, 300, 1000, 3000, 10000];

/// The checkpoint set truncated to `num_iter`.
pub fn checkpoints(num_iter: usize) -> Vec<usize> {
    CHECKPOINTS.iter().copied().filter(|&c| c <= num_iter).collect()
}

/// What a campaign runs against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Target {
    Surface(SurfaceSpec),
    Emulator {
        path: PathBuf,
        /// Serve the ensemble mean instead of predictive samples.
        #[serde(default)]
        mean: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        noise: Option<NoiseSpec>,
    },
}

impl Target {
    pub fn emulator(path: impl Into<PathBuf>) -> Self {
        Target::Emulator {
            path: path.into(),
            mean: false,
            noise: None,
        }
    }

    /// Builds the evaluator; emulator files are loaded here.
    pub fn resolve(&self) -> Result<Box<dyn Objective>> {
        match self {
            Target::Surface(spec) => Ok(Box::new(Surface::new(spec.clone())?)),
            Target::Emulator { path, mean, noise } => {
                let model = EmulatorModel::load(path)?;
                let base: Box<dyn Objective> = if *mean {
                    Box::new(Deterministic(model))
                } else {
                    Box::new(model)
                };
                match noise {
                    Some(n) => Ok(Box::new(attach(base, n.clone())?)),
                    None => Ok(base),
                }
            }
        }
    }
}

/// `emulator:<path>`, `emulator-mean:<path>`, or any surface spec string.
impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("emulator:") {
            Ok(Target::emulator(path))
        } else if let Some(path) = s.strip_prefix("emulator-mean:") {
            Ok(Target::Emulator {
                path: path.into(),
                mean: true,
                noise: None,
            })
        } else {
            Ok(Target::Surface(s.parse()?))
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Surface(spec) => f.write_str(&spec.id()),
            Target::Emulator { path, mean, noise } => {
                let prefix = if *mean { "emulator-mean" } else { "emulator" };
                write!(f, "{prefix}:{}", path.display())?;
                match noise {
                    Some(n) => write!(f, "+{n}"),
                    None => Ok(()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPlan {
    pub planners: Vec<PlannerConfig>,
    pub targets: Vec<Target>,
    pub num_iter: usize,
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: u64,
}

impl BenchmarkPlan {
    pub fn validate(&self) -> Result<()> {
        if self.planners.is_empty() || self.targets.is_empty() {
            return Err(Error::Config("a plan needs at least one planner and one target".into()));
        }
        if self.num_iter < 1 || self.repeats < 1 {
            return Err(Error::Config("num_iter and repeats must be >= 1".into()));
        }
        validate_planners(&self.planners)
    }

    /// Seed of repeat `r`; the same for every planner.
    pub fn seed(&self, repeat: usize) -> u64 {
        self.base_seed.wrapping_add(repeat as u64)
    }
}

fn validate_planners(planners: &[PlannerConfig]) -> Result<()> {
    let mut labels: Vec<String> = planners.iter().map(PlannerConfig::label).collect();
    labels.sort();
    if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("planner `{}` appears twice in the plan", w[0])));
    }
    Ok(())
}

/// Distribution summary of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub const FIELDS: [&'static str; 6] = ["mean", "median", "q1", "q3", "min", "max"];

    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Stats {
            n: values.len(),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            median: quantile(&sorted, 0.5),
            q1: quantile(&sorted, 0.25),
            q3: quantile(&sorted, 0.75),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        })
    }

    pub fn get(&self, field: &str) -> Option<f64> {
        Some(match field {
            "mean" => self.mean,
            "median" => self.median,
            "q1" => self.q1,
            "q3" => self.q3,
            "min" => self.min,
            "max" => self.max,
            _ => return None,
        })
    }
}

/// Linearly interpolated quantile of ascending `sorted` data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStats {
    pub checkpoint: usize,
    #[serde(flatten)]
    pub stats: Stats,
}

/// Per-evaluation mean and envelope of best-so-far traces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TraceBands {
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Best-so-far traces of the complete campaigns, truncated to their common length.
pub fn traces<'a>(campaigns: impl IntoIterator<Item = &'a Campaign>) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = campaigns
        .into_iter()
        .filter(|c| c.is_complete() && !c.observations.is_empty())
        .map(Campaign::best_so_far)
        .collect::<Result<_>>()?;
    let len = out.iter().map(Vec::len).min().unwrap_or(0);
    for t in &mut out {
        t.truncate(len);
    }
    Ok(out)
}

pub fn bands(traces: &[Vec<f64>]) -> TraceBands {
    let len = traces.first().map_or(0, Vec::len);
    let mut b = TraceBands::default();
    for i in 0..len {
        let column = traces.iter().map(|t| t[i]);
        b.mean.push(column.clone().sum::<f64>() / traces.len() as f64);
        b.min.push(column.clone().fold(f64::INFINITY, f64::min));
        b.max.push(column.fold(f64::NEG_INFINITY, f64::max));
    }
    b
}

pub fn checkpoint_table(traces: &[Vec<f64>]) -> Vec<CheckpointStats> {
    let len = traces.first().map_or(0, Vec::len);
    checkpoints(len)
        .into_iter()
        .filter_map(|c| {
            let column: Vec<f64> = traces.iter().map(|t| t[c - 1]).collect();
            Stats::of(&column).map(|stats| CheckpointStats { checkpoint: c, stats })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub repeat: usize,
    pub seed: u64,
    pub error: String,
}

/// Aggregated results of one (planner, target) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub planner: String,
    pub target: String,
    pub goal: Goal,
    pub seeds: Vec<u64>,
    /// Repeats that contributed to the statistics.
    pub completed: usize,
    pub trace: TraceBands,
    pub checkpoints: Vec<CheckpointStats>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Failure>,
}

impl CellReport {
    fn from_runs(planner: String, target: String, goal: Goal, runs: &[(usize, u64, Result<Campaign>)]) -> Result<Self> {
        let mut failures = Vec::new();
        let mut ok = Vec::new();
        for (repeat, seed, run) in runs {
            match run {
                Ok(c) if c.is_complete() => ok.push(c),
                Ok(c) => failures.push(Failure {
                    repeat: *repeat,
                    seed: *seed,
                    error: c.error.clone().unwrap_or_default(),
                }),
                Err(e) => failures.push(Failure {
                    repeat: *repeat,
                    seed: *seed,
                    error: e.to_string(),
                }),
            }
        }
        let t = traces(ok.iter().copied())?;
        Ok(CellReport {
            planner,
            target,
            goal,
            seeds: runs.iter().map(|r| r.1).collect(),
            completed: t.len(),
            trace: bands(&t),
            checkpoints: checkpoint_table(&t),
            failures,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub plan: BenchmarkPlan,
    pub cells: Vec<CellReport>,
}

impl BenchmarkReport {
    pub fn cell(&self, planner: &str, target: &str) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.planner == planner && c.target == target)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One row per checkpoint, one column per `planner@target:statistic`.
    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["checkpoint".to_string()];
        for cell in &self.cells {
            for field in Stats::FIELDS {
                header.push(format!("{}@{}:{field}", cell.planner, cell.target));
            }
        }
        w.write_record(&header).map_err(csv_error)?;
        for c in checkpoints(self.plan.num_iter) {
            let mut row = vec![c.to_string()];
            for cell in &self.cells {
                let stats = cell.checkpoints.iter().find(|s| s.checkpoint == c);
                for field in Stats::FIELDS {
                    row.push(stats.and_then(|s| s.stats.get(field)).map_or(String::new(), |v| v.to_string()));
                }
            }
            w.write_record(&row).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Evaluation(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `report.json` and `summary.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let json = dir.join("report.json");
        fs::write(&json, self.to_json()?).map_err(|e| Error::io(&json, e))?;
        let csv = dir.join("summary.csv");
        fs::write(&csv, self.summary_csv()?).map_err(|e| Error::io(&csv, e))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Evaluation(format!("csv: {e}"))
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Config("jobs must be >= 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every (planner, objective, repeat) campaign and appends them to `db`
/// in planner, target, repeat order regardless of scheduling.
///
/// Returns one cell per (planner, objective) in the same order.
pub fn run_grid(
    planners: &[PlannerConfig],
    objectives: &[Box<dyn Objective>],
    num_iter: usize,
    repeats: usize,
    base_seed: u64,
    db: &mut Database,
    jobs: Option<usize>,
) -> Result<Vec<CellReport>> {
    if num_iter < 1 || repeats < 1 {
        return Err(Error::Config("num_iter and repeats must be >= 1".into()));
    }
    validate_planners(planners)?;
    let units: Vec<(usize, usize, usize)> = (0..planners.len())
        .flat_map(|p| (0..objectives.len()).flat_map(move |t| (0..repeats).map(move |r| (p, t, r))))
        .collect();
    let runs: Vec<Result<Campaign>> = with_jobs(jobs, || {
        units
            .par_iter()
            .map(|&(p, t, r)| {
                let config = planners[p].with_seed(base_seed.wrapping_add(r as u64));
                let mut campaign = optimize(&config, objectives[t].as_ref(), num_iter)?;
                let label = config.label();
                campaign.id = format!("{}/{label}/seed-{}", campaign.surface, config.seed);
                campaign.planner = label;
                Ok(campaign)
            })
            .collect()
    })?;

    // Single writer: store in canonical order.
    let mut runs = runs;
    for run in runs.iter_mut().flatten() {
        run.id = db.unique_id(&run.id);
        db.append(run.clone())?;
    }

    let mut cells = Vec::with_capacity(planners.len() * objectives.len());
    let mut runs = runs.into_iter();
    for config in planners {
        for objective in objectives {
            let chunk: Vec<(usize, u64, Result<Campaign>)> = (0..repeats)
                .map(|r| (r, base_seed.wrapping_add(r as u64), runs.next().expect("one run per unit")))
                .collect();
            cells.push(CellReport::from_runs(config.label(), objective.id(), config.goal, &chunk)?);
        }
    }
    Ok(cells)
}

/// Executes a plan; campaigns go to `db`, aggregates into the report.
pub fn run_benchmark(plan: &BenchmarkPlan, db: &mut Database, jobs: Option<usize>) -> Result<BenchmarkReport> {
    plan.validate()?;
    let objectives: Vec<Box<dyn Objective>> = plan.targets.iter().map(Target::resolve).collect::<Result<_>>()?;
    let cells = run_grid(&plan.planners, &objectives, plan.num_iter, plan.repeats, plan.base_seed, db, jobs)?;
    Ok(BenchmarkReport {
        plan: plan.clone(),
        cells,
    })
}

/// Random-search best-so-far distribution on one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub target: String,
    pub goal: Goal,
    pub repeats: usize,
    pub num_iter: usize,
    pub checkpoints: Vec<CheckpointStats>,
}

impl BaselineSummary {
    pub fn from_campaigns<'a>(target: &str, goal: Goal, campaigns: impl IntoIterator<Item = &'a Campaign>) -> Result<Self> {
        let t = traces(campaigns)?;
        if t.is_empty() {
            return Err(Error::NotFound(format!("no complete campaigns for `{target}`")));
        }
        Ok(BaselineSummary {
            target: target.to_string(),
            goal,
            repeats: t.len(),
            num_iter: t[0].len(),
            checkpoints: checkpoint_table(&t),
        })
    }

    pub fn at(&self, checkpoint: usize) -> Option<&Stats> {
        self.checkpoints.iter().find(|c| c.checkpoint == checkpoint).map(|c| &c.stats)
    }
}

/// Runs `repeats` random-search campaigns on `objective` and summarizes them.
pub fn baseline_on(
    objective: Box<dyn Objective>,
    goal: Goal,
    num_iter: usize,
    repeats: usize,
    base_seed: u64,
    db: &mut Database,
    jobs: Option<usize>,
) -> Result<BaselineSummary> {
    let planner = PlannerConfig::builtin(PlannerKind::RandomSearch, goal, base_seed);
    let target = objective.id();
    let before = db.len();
    run_grid(&[planner], &[objective], num_iter, repeats, base_seed, db, jobs)?;
    BaselineSummary::from_campaigns(&target, goal, &db.entries()[before..])
}

pub fn baseline(
    target: &Target,
    goal: Goal,
    num_iter: usize,
    repeats: usize,
    base_seed: u64,
    db: &mut Database,
    jobs: Option<usize>,
) -> Result<BaselineSummary> {
    baseline_on(target.resolve()?, goal, num_iter, repeats, base_seed, db, jobs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Summary,
    Campaigns,
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "summary" => Ok(BaselineKind::Summary),
            "campaigns" => Ok(BaselineKind::Campaigns),
            _ => Err(Error::Config(format!("unknown baseline kind `{s}` (summary, campaigns)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineView {
    Summary(BaselineSummary),
    Campaigns(Vec<Campaign>),
}

/// Stored random-search campaigns for `target`, in database order.
pub fn baseline_campaigns<'a>(db: &'a Database, target: &str) -> Vec<&'a Campaign> {
    let name = PlannerKind::RandomSearch.name();
    db.entries().iter().filter(|c| c.surface == target && c.planner == name).collect()
}

/// Recomputes a baseline from stored campaigns, or returns them raw.
pub fn summarize(db: &Database, target: &str, kind: BaselineKind) -> Result<BaselineView> {
    let found = baseline_campaigns(db, target);
    let first = found
        .first()
        .ok_or_else(|| Error::NotFound(format!("no baseline campaigns for `{target}`")))?;
    Ok(match kind {
        BaselineKind::Campaigns => BaselineView::Campaigns(found.into_iter().cloned().collect()),
        BaselineKind::Summary => {
            BaselineView::Summary(BaselineSummary::from_campaigns(target, first.goal, found.iter().copied())?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::SurfaceKind;

    fn plan(planners: &[&str], repeats: usize, num_iter: usize) -> BenchmarkPlan {
        BenchmarkPlan {
            planners: planners.iter().map(|p| PlannerConfig::new(*p, Goal::Minimize, 0)).collect(),
            targets: vec![Target::Surface(SurfaceSpec::new(SurfaceKind::Dejong, 2))],
            num_iter,
            repeats,
            base_seed: 100,
        }
    }

    #[test]
    fn checkpoints_truncate_to_the_budget() {
        assert_eq!(checkpoints(30), [1, 3, 10, 30]);
        assert_eq!(checkpoints(29), [1, 3, 10]);
        assert_eq!(checkpoints(20_000).len(), 9);
    }

    #[test]
    fn quartiles_interpolate_linearly() {
        let s = Stats::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 1.75, 2.5, 3.25, 4.0));
        assert_eq!(s.mean, 2.5);
        assert!(Stats::of(&[]).is_none());
    }

    #[test]
    fn grid_shape_and_storage_order() {
        let dir = tempfile::tempdir().unwrap();
        let mut db = Database::open(dir.path().join("db.jsonl")).unwrap();
        let report = run_benchmark(&plan(&["random", "simplex"], 10, 100), &mut db, Some(3)).unwrap();
        assert_eq!(db.len(), 20);
        assert!(db.entries().iter().all(|c| c.observations.len() == 100));
        let order: Vec<(String, u64)> = db.entries().iter().map(|c| (c.planner.clone(), c.seed)).collect();
        let expected: Vec<(String, u64)> = ["RandomSearch", "Simplex"]
            .iter()
            .flat_map(|p| (100..110).map(move |s| (p.to_string(), s)))
            .collect();
        assert_eq!(order, expected);
        assert_eq!(report.cells.len(), 2);
        assert_eq!(report.cells[0].seeds, report.cells[1].seeds);
    }

    #[test]
    fn single_repeat_report_is_the_campaign_trace() {
        let dir = tempfile::tempdir().unwrap();
        let mut db = Database::open(dir.path().join("db.jsonl")).unwrap();
        let report = run_benchmark(&plan(&["cmaes"], 1, 30), &mut db, None).unwrap();
        let trace = db.entries()[0].best_so_far().unwrap();
        let cell = &report.cells[0];
        assert_eq!(cell.trace.mean, trace);
        assert_eq!(cell.trace.min, trace);
        for c in &cell.checkpoints {
            let s = c.stats;
            let v = trace[c.checkpoint - 1];
            assert_eq!([s.mean, s.median, s.q1, s.q3, s.min, s.max], [v; 6]);
        }
    }

    #[test]
    fn reruns_reproduce_reports_and_ids_stay_unique() {
        let dir = tempfile::tempdir().unwrap();
        let mut db = Database::open(dir.path().join("db.jsonl")).unwrap();
        let p = plan(&["de", "pso"], 3, 40);
        let a = run_benchmark(&p, &mut db, Some(1)).unwrap();
        let b = run_benchmark(&p, &mut db, Some(4)).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.summary_csv().unwrap(), b.summary_csv().unwrap());
        assert_eq!(Database::load(db.path()).unwrap().len(), 12);
    }

    #[test]
    fn failures_are_quarantined() {
        let dir = tempfile::tempdir().unwrap();
        let mut db = Database::open(dir.path().join("db.jsonl")).unwrap();
        // A 2x2 grid holds four cells, so 5 iterations exhaust it in every repeat.
        let mut p = plan(&["random"], 2, 5);
        p.planners.push(PlannerConfig::new("grid", Goal::Minimize, 0).set("levels", 2.0));
        let report = run_benchmark(&p, &mut db, None).unwrap();
        assert_eq!(report.cells[0].completed, 2);
        let grid = &report.cells[1];
        assert_eq!(grid.completed, 0);
        assert_eq!(grid.failures.iter().map(|f| f.repeat).collect::<Vec<_>>(), [0, 1]);
        assert!(grid.checkpoints.is_empty());
        // Partial campaigns are still stored.
        assert_eq!(db.len(), 4);
    }

    #[test]
    fn duplicate_planners_are_rejected() {
        assert!(plan(&["cmaes", "CMA-ES"], 1, 10).validate().is_err());
        assert!(plan(&["random"], 0, 10).validate().is_err());
    }

    #[test]
    fn summary_csv_has_one_row_per_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let mut db = Database::open(dir.path().join("db.jsonl")).unwrap();
        let report = run_benchmark(&plan(&["random"], 4, 30), &mut db, None).unwrap();
        let csv = report.summary_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("checkpoint,RandomSearch@dejong:d=2:mean,"));
        assert_eq!(lines[0].split(',').count(), 7);
    }

    #[test]
    fn summarize_matches_the_baseline() {
        let dir = tempfile::tempdir().unwrap();
        let mut db = Database::open(dir.path().join("db.jsonl")).unwrap();
        let target = Target::Surface(SurfaceSpec::new(SurfaceKind::Rastrigin, 2));
        assert!(matches!(
            summarize(&db, "rastrigin:d=2", BaselineKind::Summary),
            Err(Error::NotFound(_))
        ));
        let summary = baseline(&target, Goal::Minimize, 30, 6, 0, &mut db, None).unwrap();
        assert_eq!(summary.checkpoints.iter().map(|c| c.checkpoint).collect::<Vec<_>>(), [1, 3, 10, 30]);
        let reloaded = Database::load(db.path()).unwrap();
        match summarize(&reloaded, &summary.target, BaselineKind::Summary).unwrap() {
            BaselineView::Summary(s) => assert_eq!(s, summary),
            other => panic!("{other:?}"),
        }
        match summarize(&reloaded, &summary.target, BaselineKind::Campaigns).unwrap() {
            BaselineView::Campaigns(c) => assert_eq!(c.len(), 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn targets_parse_and_print() {
        let t: Target = "emulator-mean:models/x.emu".parse().unwrap();
        assert_eq!(t, Target::Emulator { path: "models/x.emu".into(), mean: true, noise: None });
        assert_eq!(t.to_string(), "emulator-mean:models/x.emu");
        let s: Target = "rosenbrock:d=3".parse().unwrap();
        assert_eq!(s.to_string(), "rosenbrock:d=3");
        assert!("nonsense".parse::<Target>().is_err());
    }
}
