//! Argument parsing and command dispatch for the `noisybench` binary.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Deserialize;

use noisybench_core::benchmark::{self, BaselineView};
use noisybench_core::emulator::{self, Activation, OutputTransform, SyntheticKind};
use noisybench_core::{
    BaselineKind, BenchmarkPlan, Database, DatasetTable, EmulatorConfig, EmulatorModel, Error, Goal, NoiseKind,
    NoiseSpec, PlannerConfig, Surface, SurfaceSpec, Target,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_DB: &str = "campaigns.jsonl";

#[derive(Debug, Parser)]
#[command(name = "noisybench", version, about = "Benchmark optimizers on noisy synthetic surfaces and emulators")]
pub struct Cli {
    /// Campaign database (JSON lines); defaults to the config value, then campaigns.jsonl
    #[arg(long, global = true, value_name = "PATH")]
    pub db: Option<PathBuf>,

    /// TOML file supplying defaults for db, jobs, seed, iters, repeats and registry
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Home directory; the dataset registry lives in its `datasets` folder
    #[arg(long, global = true, env = "NOISYBENCH_HOME", value_name = "DIR")]
    pub home: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one campaign and append it to the database
    Run(RunArgs),
    /// Run every planner against every target and write an aggregate report
    Benchmark(BenchmarkArgs),
    /// Run random-search baselines, or read a stored one back
    Baseline(BaselineArgs),
    /// Train an emulator ensemble on a dataset
    TrainEmulator(TrainArgs),
    /// Manage the local dataset registry
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Write one SVG and CSV of best-so-far traces per target in the database
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["surface", "emulator"])))]
pub struct RunArgs {
    /// Planner name, optionally with hyperparameters as `name:key=value,...`
    #[arg(long)]
    pub planner: String,

    /// Surface spec such as `dejong:d=2` or `michalewicz:d=3,m=10`
    #[arg(long)]
    pub surface: Option<String>,

    /// Trained emulator file (.emu) to optimize against
    #[arg(long, value_name = "PATH")]
    pub emulator: Option<PathBuf>,

    /// Query the emulator's ensemble mean rather than predictive samples
    #[arg(long, requires = "emulator")]
    pub mean: bool,

    /// Additive response noise such as `gaussian:0.5`
    #[arg(long)]
    pub noise: Option<String>,

    /// Evaluation budget
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub iters: Option<u64>,

    /// Seed for the planner and the evaluation noise
    #[arg(long)]
    pub seed: Option<u64>,

    /// minimize or maximize; emulators default to their dataset's goal
    #[arg(long)]
    pub goal: Option<String>,

    /// Planner hyperparameter override `key=value`; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Planner as `name[:key=value,...]`; repeatable
    #[arg(long = "planner", value_name = "PLANNER")]
    pub planners: Vec<String>,

    /// Surface spec, `emulator:<path>` or `emulator-mean:<path>`; repeatable
    #[arg(long = "target", value_name = "TARGET")]
    pub targets: Vec<String>,

    /// JSON benchmark plan; replaces --planner, --target, --iters, --repeats and --seed
    #[arg(long, value_name = "PATH", conflicts_with_all = ["planners", "targets"])]
    pub plan: Option<PathBuf>,

    /// Evaluations per campaign
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub iters: Option<u64>,

    /// Campaigns per planner and target
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: Option<u64>,

    /// Base seed; repeat r uses seed + r
    #[arg(long)]
    pub seed: Option<u64>,

    /// Goal shared by all planners: minimize or maximize
    #[arg(long, default_value = "minimize")]
    pub goal: String,

    /// Worker threads; results do not depend on it
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,

    /// Directory receiving report.json and summary.csv
    #[arg(long, default_value = "report", value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Target to run the baseline on; repeatable
    #[arg(long = "target", value_name = "TARGET", required_unless_present = "get")]
    pub targets: Vec<String>,

    /// Print the stored baseline for this target id instead of running one
    #[arg(long, value_name = "TARGET", conflicts_with = "targets")]
    pub get: Option<String>,

    /// With --get: `summary` statistics or the raw `campaigns`
    #[arg(long, default_value = "summary", requires = "get")]
    pub kind: String,

    /// Evaluations per campaign
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub iters: u64,

    /// Campaigns per target
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,

    /// Base seed; repeat r uses seed + r
    #[arg(long)]
    pub seed: Option<u64>,

    /// minimize or maximize
    #[arg(long, default_value = "minimize")]
    pub goal: String,

    /// Worker threads; results do not depend on it
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,

    /// Also write the summaries as JSON to this file
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset directory, CSV file with a sidecar, or registry name
    #[arg(long, value_name = "DATA")]
    pub data: String,

    /// Hidden layers per network
    #[arg(long)]
    pub depth: Option<usize>,

    /// Units per hidden layer
    #[arg(long)]
    pub width: Option<usize>,

    /// Ensemble size
    #[arg(long)]
    pub members: Option<usize>,

    /// Hidden activation: softplus, relu, tanh, sigmoid or identity
    #[arg(long)]
    pub activation: Option<String>,

    /// Output transform: identity, positive or bounded:<lo>:<hi>
    #[arg(long)]
    pub output: Option<String>,

    /// Maximum training epochs
    #[arg(long)]
    pub epochs: Option<usize>,

    /// SGD step size
    #[arg(long)]
    pub learning_rate: Option<f64>,

    /// SGD momentum in [0, 1)
    #[arg(long)]
    pub momentum: Option<f64>,

    /// Minibatch size
    #[arg(long)]
    pub batch_size: Option<usize>,

    /// Epochs without validation improvement before stopping
    #[arg(long)]
    pub patience: Option<usize>,

    /// Train every member on the full training split instead of a bootstrap resample
    #[arg(long)]
    pub no_bootstrap: bool,

    /// Share of rows used for training; the rest is the test split
    #[arg(long)]
    pub train_fraction: Option<f64>,

    /// Seed for the split, initialization and minibatch order
    #[arg(long)]
    pub seed: Option<u64>,

    /// Also run K-fold cross-validation and print its report
    #[arg(long, value_name = "K")]
    pub cv: Option<usize>,

    /// Model file to write; defaults to `<dataset>.emu`
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Exit 1 when the model misses the acceptance thresholds
    #[arg(long)]
    pub require_accepted: bool,
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// List registered datasets
    List,
    /// Validate a dataset and copy it into the registry
    Add(AddArgs),
    /// Write a dataset sampled from a synthetic function or surface
    GenSynthetic(GenArgs),
}

#[derive(Debug, Args)]
pub struct AddArgs {
    /// CSV file with one column per parameter plus the target
    #[arg(long, value_name = "CSV")]
    pub data: PathBuf,

    /// Metadata JSON with params, target and goal
    #[arg(long, value_name = "JSON")]
    pub meta: PathBuf,

    /// Registry name; defaults to the CSV file stem
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// `sine`, `linear`, or a surface spec such as `dejong:d=2`
    #[arg(long)]
    pub kind: String,

    /// Number of rows
    #[arg(long, value_parser = clap::value_parser!(u64).range(10..))]
    pub n: u64,

    /// Response noise such as `gaussian:0.05`; sine and linear take gaussian only
    #[arg(long)]
    pub noise: Option<String>,

    /// Seed for the sample points and noise
    #[arg(long)]
    pub seed: Option<u64>,

    /// Dataset name; defaults to the kind
    #[arg(long)]
    pub name: Option<String>,

    /// Write here instead of into the registry
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Directory receiving the SVG and CSV files
    #[arg(long, default_value = "plots", value_name = "DIR")]
    pub out: PathBuf,
}

/// Defaults read from `--config`; flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub db: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub iters: Option<usize>,
    pub repeats: Option<usize>,
    pub registry: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input; exit 2.
    Usage(String),
    /// The operation ran but did not fully succeed; exit 1.
    Failed(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_RUNTIME,
            CliError::Core(e) => match e {
                Error::Contract(_)
                | Error::Domain(_)
                | Error::Config(_)
                | Error::Parse { .. }
                | Error::Ingest { .. }
                | Error::NotFound(_)
                | Error::Version { .. }
                | Error::DuplicateId(_) => EXIT_USAGE,
                _ => EXIT_RUNTIME,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == EXIT_USAGE {
                eprintln!("hint: see `noisybench --help`");
            }
            e.exit_code()
        }
    }
}

struct Context {
    db: PathBuf,
    registry: PathBuf,
    config: Config,
}

impl Context {
    fn new(cli: &Cli) -> CliResult<Self> {
        let config = match &cli.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let db = cli
            .db
            .clone()
            .or_else(|| config.db.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_DB));
        let registry = match (&cli.home, &config.registry) {
            (Some(home), _) => home.join("datasets"),
            (None, Some(registry)) => registry.clone(),
            (None, None) => std::env::var_os("HOME")
                .map(PathBuf::from)
                .unwrap_or_default()
                .join(".noisybench")
                .join("datasets"),
        };
        Ok(Context { db, registry, config })
    }

    fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.config.seed).unwrap_or(0)
    }

    fn jobs(&self, flag: Option<u64>) -> Option<usize> {
        flag.map(|j| j as usize).or(self.config.jobs)
    }

    fn open_db(&self) -> CliResult<Database> {
        Ok(Database::open(&self.db)?)
    }
}

pub fn execute(cli: Cli) -> CliResult {
    let ctx = Context::new(&cli)?;
    match cli.command {
        Command::Run(a) => cmd_run(&ctx, a),
        Command::Benchmark(a) => cmd_benchmark(&ctx, a),
        Command::Baseline(a) => cmd_baseline(&ctx, a),
        Command::TrainEmulator(a) => cmd_train(&ctx, a),
        Command::Dataset(DatasetCommand::List) => cmd_dataset_list(&ctx),
        Command::Dataset(DatasetCommand::Add(a)) => cmd_dataset_add(&ctx, a),
        Command::Dataset(DatasetCommand::GenSynthetic(a)) => cmd_gen_synthetic(&ctx, a),
        Command::Plot(a) => cmd_plot(&ctx, a),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> CliResult<T> {
    Ok(s.parse::<T>()?)
}

fn parse_assignment(s: &str) -> CliResult<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("`{s}` must look like key=value")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("`{v}` in `{s}` is not a number")))?;
    Ok((k.trim().to_string(), v))
}

/// `name` or `name:key=value,key=value`.
pub fn parse_planner(s: &str, goal: Goal, seed: u64) -> CliResult<PlannerConfig> {
    let (name, sets) = match s.split_once(':') {
        Some((name, sets)) => (name, sets.split(',').filter(|p| !p.trim().is_empty()).collect()),
        None => (s, Vec::new()),
    };
    let mut config = PlannerConfig::new(name.trim(), goal, seed);
    for set in sets {
        let (k, v) = parse_assignment(set)?;
        config = config.set(k, v);
    }
    // Reject unknown names and hyperparameters before any work starts.
    noisybench_core::Planner::new(config.clone(), noisybench_core::ParamSpace::unit(1)?)?;
    Ok(config)
}

/// `a,b` and repeated flags both yield separate planners; commas inside a
/// hyperparameter list stay with their planner.
fn split_planners(flags: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for flag in flags {
        for piece in flag.split(',') {
            match out.last_mut() {
                Some(last) if piece.contains('=') && !piece.contains(':') && last.contains(':') => {
                    last.push(',');
                    last.push_str(piece);
                }
                _ if piece.trim().is_empty() => {}
                _ => out.push(piece.trim().to_string()),
            }
        }
    }
    out
}

fn default_goal(target: &Target) -> CliResult<Goal> {
    Ok(match target {
        Target::Surface(_) => Goal::Minimize,
        Target::Emulator { path, .. } => EmulatorModel::load(path)?.goal,
    })
}

fn cmd_run(ctx: &Context, a: RunArgs) -> CliResult {
    let noise = a.noise.as_deref().map(parse::<NoiseSpec>).transpose()?;
    let target = match (&a.surface, &a.emulator) {
        (Some(spec), _) => {
            let mut spec: SurfaceSpec = parse(spec)?;
            if let Some(n) = noise {
                spec = spec.with_noise(n);
            }
            Target::Surface(spec)
        }
        (None, Some(path)) => Target::Emulator {
            path: path.clone(),
            mean: a.mean,
            noise,
        },
        (None, None) => unreachable!("clap requires a target"),
    };
    let goal = match &a.goal {
        Some(g) => parse(g)?,
        None => default_goal(&target)?,
    };
    let iters = a.iters.map(|n| n as usize).or(ctx.config.iters).unwrap_or(100);
    if iters == 0 {
        return Err(CliError::Usage("iters must be >= 1".into()));
    }
    let mut config = parse_planner(&a.planner, goal, ctx.seed(a.seed))?;
    for set in &a.set {
        let (k, v) = parse_assignment(set)?;
        config = config.set(k, v);
    }
    let objective = target.resolve()?;
    let mut db = ctx.open_db()?;
    let mut campaign = noisybench_core::optimize(&config, objective.as_ref(), iters)?;
    campaign.id = db.unique_id(&campaign.id);
    let error = campaign.error.clone();
    let best = campaign.best().map(|o| (o.value, o.params.as_slice().to_vec()));
    let id = campaign.id.clone();
    db.append(campaign)?;
    match best {
        Some((value, params)) => println!("{id}: best {value} at {params:?}"),
        None => println!("{id}: no observations"),
    }
    match error {
        Some(e) => Err(CliError::Failed(format!("campaign stopped early: {e}"))),
        None => Ok(()),
    }
}

fn cmd_benchmark(ctx: &Context, a: BenchmarkArgs) -> CliResult {
    let plan = match &a.plan {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<BenchmarkPlan>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => {
            if a.planners.is_empty() || a.targets.is_empty() {
                return Err(CliError::Usage("benchmark needs --plan, or at least one --planner and --target".into()));
            }
            let goal: Goal = parse(&a.goal)?;
            let base_seed = ctx.seed(a.seed);
            BenchmarkPlan {
                planners: split_planners(&a.planners)
                    .iter()
                    .map(|p| parse_planner(p, goal, base_seed))
                    .collect::<CliResult<_>>()?,
                targets: a.targets.iter().map(|t| parse::<Target>(t)).collect::<CliResult<_>>()?,
                num_iter: a.iters.map(|n| n as usize).or(ctx.config.iters).unwrap_or(100),
                repeats: a.repeats.map(|n| n as usize).or(ctx.config.repeats).unwrap_or(10),
                base_seed,
            }
        }
    };
    let mut db = ctx.open_db()?;
    let report = noisybench_core::run_benchmark(&plan, &mut db, ctx.jobs(a.jobs))?;
    report.write(&a.out)?;
    let failed: usize = report.cells.iter().map(|c| c.failures.len()).sum();
    for cell in &report.cells {
        let last = cell.checkpoints.last().map(|c| c.stats.median);
        println!(
            "{} on {}: {}/{} complete, median best {}",
            cell.planner,
            cell.target,
            cell.completed,
            cell.seeds.len(),
            last.map_or("n/a".to_string(), |m| m.to_string())
        );
    }
    println!("report written to {}", a.out.display());
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} campaign(s) failed; see report.json")));
    }
    Ok(())
}

fn cmd_baseline(ctx: &Context, a: BaselineArgs) -> CliResult {
    if let Some(target) = &a.get {
        let kind: BaselineKind = parse(&a.kind)?;
        let db = ctx.open_db()?;
        let json = match benchmark::summarize(&db, target, kind)? {
            BaselineView::Summary(s) => serde_json::to_string_pretty(&s).map_err(Error::from)?,
            BaselineView::Campaigns(c) => serde_json::to_string_pretty(&c).map_err(Error::from)?,
        };
        println!("{json}");
        return Ok(());
    }
    let goal: Goal = parse(&a.goal)?;
    let targets: Vec<Target> = a.targets.iter().map(|t| parse::<Target>(t)).collect::<CliResult<_>>()?;
    let mut db = ctx.open_db()?;
    let mut summaries = Vec::new();
    for target in &targets {
        let summary = noisybench_core::baseline(
            target,
            goal,
            a.iters as usize,
            a.repeats as usize,
            ctx.seed(a.seed),
            &mut db,
            ctx.jobs(a.jobs),
        )?;
        if let Some(last) = summary.checkpoints.last() {
            println!(
                "{}: {} repeats, median best {} at {} evaluations",
                summary.target, summary.repeats, last.stats.median, last.checkpoint
            );
        }
        summaries.push(summary);
    }
    if let Some(out) = &a.out {
        let json = serde_json::to_string_pretty(&summaries).map_err(Error::from)?;
        write_file(out, &(json + "\n"))?;
    }
    let complete: usize = summaries.iter().map(|s| s.repeats).sum();
    if complete < targets.len() * a.repeats as usize {
        return Err(CliError::Failed("some baseline campaigns stopped early".into()));
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> CliResult {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Failed(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

fn load_dataset(ctx: &Context, data: &str) -> CliResult<DatasetTable> {
    let path = Path::new(data);
    if path.exists() {
        return Ok(DatasetTable::ingest_dir(path)?);
    }
    let registered = ctx.registry.join(format!("{data}.csv"));
    if registered.is_file() {
        return Ok(DatasetTable::ingest(registered)?);
    }
    Err(CliError::Usage(format!(
        "`{data}` is neither a path nor a dataset in {}",
        ctx.registry.display()
    )))
}

fn cmd_train(ctx: &Context, a: TrainArgs) -> CliResult {
    let table = load_dataset(ctx, &a.data)?;
    let d = EmulatorConfig::default();
    let config = EmulatorConfig {
        hidden_depth: a.depth.unwrap_or(d.hidden_depth),
        hidden_width: a.width.unwrap_or(d.hidden_width),
        activation: a.activation.as_deref().map(parse::<Activation>).transpose()?.unwrap_or(d.activation),
        output: a.output.as_deref().map(parse::<OutputTransform>).transpose()?.unwrap_or(d.output),
        members: a.members.unwrap_or(d.members),
        epochs: a.epochs.unwrap_or(d.epochs),
        learning_rate: a.learning_rate.unwrap_or(d.learning_rate),
        momentum: a.momentum.unwrap_or(d.momentum),
        batch_size: a.batch_size.unwrap_or(d.batch_size),
        patience: a.patience.unwrap_or(d.patience),
        bootstrap: !a.no_bootstrap,
        train_fraction: a.train_fraction.unwrap_or(d.train_fraction),
        seed: ctx.seed(a.seed),
    };
    config.validate()?;
    if let Some(k) = a.cv {
        let report = emulator::cross_validate(&table, &config, k)?;
        println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
    }
    let model = EmulatorModel::train(&table, &config)?;
    let out = a.out.unwrap_or_else(|| PathBuf::from(format!("{}.emu", table.name)));
    model.save(&out)?;
    let (tr, te) = (model.train_metrics, model.test_metrics);
    println!(
        "{}: train r2 {:.4} rho {:.4}, test r2 {:.4} rho {:.4}, accepted {}",
        out.display(),
        tr.r2,
        tr.spearman,
        te.r2,
        te.spearman,
        model.accepted
    );
    if a.require_accepted && !model.accepted {
        return Err(CliError::Failed("model misses the acceptance thresholds".into()));
    }
    Ok(())
}

/// Registered datasets as (name, csv path), sorted by name.
pub fn registry_entries(registry: &Path) -> CliResult<Vec<(String, PathBuf)>> {
    let Ok(dir) = fs::read_dir(registry) else {
        return Ok(Vec::new());
    };
    let mut out: Vec<(String, PathBuf)> = dir
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .filter_map(|p| Some((p.file_stem()?.to_str()?.to_string(), p)))
        .collect();
    out.sort();
    Ok(out)
}

fn cmd_dataset_list(ctx: &Context) -> CliResult {
    for (name, path) in registry_entries(&ctx.registry)? {
        match DatasetTable::ingest(&path) {
            Ok(t) => println!("{name}\t{} rows\t{} params\ttarget {}", t.len(), t.dim(), t.target_name),
            Err(e) => println!("{name}\tinvalid: {e}"),
        }
    }
    Ok(())
}

fn valid_name(name: &str) -> CliResult {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c));
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(format!("dataset name `{name}` may only use letters, digits, `.`, `_` and `-`")))
    }
}

fn cmd_dataset_add(ctx: &Context, a: AddArgs) -> CliResult {
    // Validation happens before anything touches the registry.
    let table = DatasetTable::ingest_with_meta(&a.data, &a.meta)?;
    let name = a.name.unwrap_or_else(|| table.name.clone());
    valid_name(&name)?;
    let csv = ctx.registry.join(format!("{name}.csv"));
    let meta = ctx.registry.join(format!("{name}{}", emulator::META_SUFFIX));
    if csv.exists() || meta.exists() {
        return Err(CliError::Usage(format!("dataset `{name}` is already registered")));
    }
    let copy = |from: &Path, to: &Path| {
        fs::copy(from, to).map_err(|e| CliError::Failed(format!("copying {}: {e}", from.display())))
    };
    fs::create_dir_all(&ctx.registry)
        .map_err(|e| CliError::Failed(format!("{}: {e}", ctx.registry.display())))?;
    copy(&a.data, &csv)?;
    if let Err(e) = copy(&a.meta, &meta) {
        let _ = fs::remove_file(&csv);
        return Err(e);
    }
    println!("added `{name}`: {} rows, {} params", table.len(), table.dim());
    Ok(())
}

fn cmd_gen_synthetic(ctx: &Context, a: GenArgs) -> CliResult {
    let noise = a.noise.as_deref().map(parse::<NoiseSpec>).transpose()?;
    let seed = ctx.seed(a.seed);
    let n = a.n as usize;
    let mut table = match a.kind.parse::<SyntheticKind>() {
        Ok(kind) => {
            let sd = match &noise {
                None => 0.0,
                Some(spec) if spec.kind == NoiseKind::Gaussian => spec.scale,
                Some(_) => return Err(CliError::Usage(format!("`{}` only takes gaussian noise", a.kind))),
            };
            emulator::synthetic_dataset(kind, n, sd, seed)?
        }
        Err(_) => {
            let mut spec: SurfaceSpec = parse(&a.kind)?;
            if let Some(n) = noise {
                spec = spec.with_noise(n);
            }
            let surface = Surface::new(spec)?;
            emulator::sample_dataset(&surface, &surface.spec().kind.name().to_ascii_lowercase(), n, seed)?
        }
    };
    if let Some(name) = a.name {
        valid_name(&name)?;
        table.name = name;
    }
    let dir = a.out.unwrap_or_else(|| ctx.registry.clone());
    let path = table.write(&dir)?;
    println!("wrote {} ({} rows, {} params)", path.display(), table.len(), table.dim());
    Ok(())
}

fn cmd_plot(ctx: &Context, a: PlotArgs) -> CliResult {
    let db = ctx.open_db()?;
    if db.is_empty() {
        return Err(CliError::Usage(format!("{} holds no campaigns", ctx.db.display())));
    }
    for path in noisybench_core::plot::plot_from_db(&db, &a.out)? {
        println!("{}", path.display());
    }
    Ok(())
}
