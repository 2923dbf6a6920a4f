//! Benchmarking toolkit for noisy black-box optimization and experiment planning.

pub mod benchmark;
pub mod campaign;
pub mod database;
pub mod emulator;
pub mod error;
pub mod noise;
pub mod objective;
pub mod planners;
pub mod plot;
pub mod space;
pub mod surfaces;

pub use benchmark::{
    baseline, run_benchmark, summarize, BaselineKind, BaselineSummary, BenchmarkPlan, BenchmarkReport, Target,
};
pub use campaign::{best_so_far, Campaign, Observation};
pub use database::Database;
pub use emulator::{DatasetTable, EmulatorConfig, EmulatorModel};
pub use error::{Error, Result};
pub use noise::{NoiseKind, NoiseSpec};
pub use objective::{attach, Objective};
pub use planners::{optimize, register_custom, CustomPlannerDef, Planner, PlannerConfig, PlannerKind};
pub use space::{Goal, ParamDef, ParamSpace, ParamVector};
pub use surfaces::{Surface, SurfaceKind, SurfaceSpec};
