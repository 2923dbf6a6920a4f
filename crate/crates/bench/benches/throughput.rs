use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use noisybench_core::{optimize, Goal, PlannerConfig, PlannerKind};
use noisybench_bench::{emulator, surface, SURFACES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn surfaces(c: &mut Criterion) {
    let mut group = c.benchmark_group("surface_value");
    for spec in SURFACES {
        let s = surface(spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x: Vec<f64> = (0..s.dim()).map(|_| rng.random()).collect();
        group.bench_function(BenchmarkId::from_parameter(spec), |b| b.iter(|| s.value(black_box(&x)).unwrap()));
    }
    group.finish();
}

fn emulators(c: &mut Criterion) {
    let mut group = c.benchmark_group("emulate");
    for (depth, width) in [(3, 48), (4, 64)] {
        let model = emulator(depth, width).unwrap();
        let x = [0.3, 0.7];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let id = format!("{depth}x{width}");
        group.bench_function(BenchmarkId::new("mean", &id), |b| b.iter(|| model.emulate(black_box(&x)).unwrap()));
        group.bench_function(BenchmarkId::new("stochastic", &id), |b| {
            b.iter(|| model.emulate_stochastic(black_box(&x), &mut rng).unwrap())
        });
    }
    group.finish();
}

fn planners(c: &mut Criterion) {
    let target = surface("dejong:d=4").unwrap();
    let mut group = c.benchmark_group("campaign_100");
    group.sample_size(10);
    for kind in PlannerKind::ALL {
        let config = PlannerConfig::builtin(kind, Goal::Minimize, 0);
        group.bench_function(BenchmarkId::from_parameter(kind.name()), |b| {
            b.iter(|| optimize(&config, &target, 100).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, surfaces, emulators, planners);
criterion_main!(benches);
