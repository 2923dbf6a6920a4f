use super::*;
use crate::objective::{FnObjective, Negated};
use crate::space::ParamDef;
use crate::surfaces::{Surface, SurfaceKind, SurfaceSpec};

const SEEDS: [u64; 5] = [0, 1, 7, 42, 2024];

fn surface(kind: SurfaceKind) -> Surface {
    Surface::new(SurfaceSpec::new(kind, 2)).unwrap()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) }
}

fn median_best(kind: PlannerKind, target: &Surface, seeds: std::ops::Range<u64>, num_iter: usize) -> f64 {
    let bests = seeds
        .map(|seed| {
            let config = PlannerConfig::builtin(kind, Goal::Minimize, seed);
            let c = optimize(&config, target, num_iter).unwrap();
            assert!(c.error.is_none(), "{kind}: {:?}", c.error);
            c.best().unwrap().value
        })
        .collect();
    median(bests)
}

#[test]
fn every_planner_stays_in_bounds() {
    let space = ParamSpace::new(vec![
        ParamDef::new("a", -3.0, 2.0),
        ParamDef::new("b", 0.0, 1e-3),
        ParamDef::new("c", 10.0, 1000.0),
    ])
    .unwrap();
    let f = |x: &[f64]| (x[0] - 1.9).powi(2) + x[1] * 1e3 + (x[2] / 100.0 - 3.0).powi(2);
    for kind in PlannerKind::ALL {
        for seed in SEEDS {
            let mut p = Planner::new(PlannerConfig::builtin(kind, Goal::Minimize, seed), space.clone()).unwrap();
            let mut asked = 0;
            while asked < 500 {
                let x = match p.ask() {
                    Ok(x) => x,
                    Err(Error::PlanExhausted(_)) => break,
                    Err(e) => panic!("{kind}: {e}"),
                };
                assert!(space.contains(&x), "{kind} seed {seed}: {:?}", x.as_slice());
                p.tell(&x, f(&x)).unwrap();
                asked += 1;
            }
            if kind != PlannerKind::GridSearch {
                assert_eq!(asked, 500, "{kind}");
            }
        }
    }
}

#[test]
fn identical_tells_give_identical_asks() {
    let target = surface(SurfaceKind::Rosenbrock);
    for kind in PlannerKind::ALL {
        let run = || {
            optimize(&PlannerConfig::builtin(kind, Goal::Minimize, 5), &target, 60)
                .unwrap()
                .observations
                .iter()
                .map(|o| o.params.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run(), "{kind}");
    }
}

#[test]
fn repeated_ask_returns_pending_point() {
    for kind in PlannerKind::ALL {
        let mut p = Planner::new(PlannerConfig::builtin(kind, Goal::Minimize, 3), ParamSpace::unit(2).unwrap()).unwrap();
        let x = p.ask().unwrap();
        assert_eq!(p.ask().unwrap(), x, "{kind}");
    }
}

#[test]
fn starting_planners_share_first_point() {
    let space = ParamSpace::unit(3).unwrap();
    let first = |kind| {
        Planner::new(PlannerConfig::builtin(kind, Goal::Minimize, 9), space.clone())
            .unwrap()
            .ask()
            .unwrap()
    };
    let reference = first(PlannerKind::RandomSearch);
    for kind in [
        PlannerKind::Simplex,
        PlannerKind::SteepestDescent,
        PlannerKind::DifferentialEvolution,
        PlannerKind::ParticleSwarm,
        PlannerKind::CmaEs,
        PlannerKind::Genetic,
        PlannerKind::BasinHopping,
        PlannerKind::GpBayesOpt,
    ] {
        assert_eq!(first(kind), reference, "{kind}");
    }
}

#[test]
fn grid_enumerates_cartesian_product_then_stops() {
    let config = PlannerConfig::builtin(PlannerKind::GridSearch, Goal::Minimize, 0).set("levels", 3.0);
    let mut p = Planner::new(config, ParamSpace::unit(2).unwrap()).unwrap();
    let mut seen = Vec::new();
    for _ in 0..9 {
        let x = p.ask().unwrap();
        p.tell(&x, 0.0).unwrap();
        seen.push(x.into_inner());
    }
    assert!(matches!(p.ask(), Err(Error::PlanExhausted(9))));
    let mut expected = Vec::new();
    for a in [0.0, 0.5, 1.0] {
        for b in [0.0, 0.5, 1.0] {
            expected.push(vec![a, b]);
        }
    }
    assert_eq!(seen, expected);
}

#[test]
fn grid_levels_follow_budget_when_optimizing() {
    let target = surface(SurfaceKind::Dejong);
    let c = optimize(&PlannerConfig::builtin(PlannerKind::GridSearch, Goal::Minimize, 0), &target, 10).unwrap();
    // ceil(sqrt(10)) = 4 levels per axis, so 16 cells and no exhaustion.
    assert!(c.error.is_none());
    assert_eq!(c.observations.len(), 10);
    assert_eq!(ceil_root(10, 2), 4);
    assert_eq!(ceil_root(16, 2), 4);
    assert_eq!(ceil_root(17, 2), 5);
    assert_eq!(ceil_root(1, 3), 1);
}

#[test]
fn lhs_fills_each_stratum_once() {
    for n in [10usize, 100] {
        let config = PlannerConfig::builtin(PlannerKind::LatinHypercube, Goal::Minimize, 4).set("samples", n as f64);
        let mut p = Planner::new(config, ParamSpace::unit(1).unwrap()).unwrap();
        let mut counts = vec![0; n];
        for _ in 0..n {
            let x = p.ask().unwrap();
            counts[((x[0] * n as f64) as usize).min(n - 1)] += 1;
            p.tell(&x, 0.0).unwrap();
        }
        assert!(counts.iter().all(|c| *c == 1), "n = {n}: {counts:?}");
    }
}

#[test]
fn simplex_converges_on_parabola() {
    let target = FnObjective::new("parabola", ParamSpace::uniform(1, -1.0, 1.0).unwrap(), |x| x[0] * x[0]);
    let c = optimize(&PlannerConfig::builtin(PlannerKind::Simplex, Goal::Minimize, 0), &target, 100).unwrap();
    let best = c.best().unwrap().value;
    assert!(best <= 1e-6, "best {best}");
}

#[test]
fn next_ask_moves_after_tell() {
    let target = surface(SurfaceKind::Dejong);
    for kind in PlannerKind::ALL.into_iter().filter(|k| *k != PlannerKind::GridSearch) {
        for seed in SEEDS {
            let mut p = Planner::new(PlannerConfig::builtin(kind, Goal::Minimize, seed), target.space().clone()).unwrap();
            let mut rng = evaluation_rng(seed);
            for round in 0..30 {
                let x = p.ask().unwrap();
                p.tell(&x, target.evaluate(&x, &mut rng).unwrap()).unwrap();
                assert_ne!(p.ask().unwrap(), x, "{kind} seed {seed} round {round}");
            }
        }
    }
}

#[test]
fn maximizing_negation_matches_minimizing() {
    let target = surface(SurfaceKind::Dejong);
    let flipped = Negated(surface(SurfaceKind::Dejong));
    for kind in PlannerKind::ALL {
        let lo = optimize(&PlannerConfig::builtin(kind, Goal::Minimize, 11), &target, 40).unwrap();
        let hi = optimize(&PlannerConfig::builtin(kind, Goal::Maximize, 11), &flipped, 40).unwrap();
        let params = |c: &Campaign| c.observations.iter().map(|o| o.params.clone()).collect::<Vec<_>>();
        assert_eq!(params(&lo), params(&hi), "{kind}");
        assert_eq!(lo.best().unwrap().eval_index, hi.best().unwrap().eval_index, "{kind}");
    }
}

#[test]
fn campaign_has_requested_length_and_id() {
    let target = surface(SurfaceKind::Dejong);
    let c = optimize(&PlannerConfig::builtin(PlannerKind::RandomSearch, Goal::Minimize, 3), &target, 1).unwrap();
    assert_eq!(c.observations.len(), 1);
    assert_eq!(c.id, "dejong:d=2/RandomSearch/seed-3");
    assert!(optimize(&PlannerConfig::builtin(PlannerKind::RandomSearch, Goal::Minimize, 3), &target, 0).is_err());
}

#[test]
fn failing_objective_keeps_prefix() {
    let space = ParamSpace::unit(1).unwrap();
    let calls = std::sync::atomic::AtomicUsize::new(0);
    let target = FnObjective::new("flaky", space, move |_| {
        if calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst) >= 4 { f64::NAN } else { 1.0 }
    });
    let c = optimize(&PlannerConfig::builtin(PlannerKind::RandomSearch, Goal::Minimize, 0), &target, 10).unwrap();
    assert_eq!(c.observations.len(), 4);
    assert!(c.error.is_some());
}

#[test]
fn unknown_hyperparameter_is_rejected() {
    let config = PlannerConfig::builtin(PlannerKind::CmaEs, Goal::Minimize, 0).set("temperature", 1.0);
    let err = Planner::new(config, ParamSpace::unit(2).unwrap()).unwrap_err();
    assert!(err.to_string().contains("temperature"), "{err}");
    let ok = PlannerConfig::builtin(PlannerKind::CmaEs, Goal::Minimize, 0).set("popsize", 12.0);
    assert!(Planner::new(ok, ParamSpace::unit(2).unwrap()).is_ok());
    let bad = PlannerConfig::builtin(PlannerKind::CmaEs, Goal::Minimize, 0).set("popsize", 2.5);
    assert!(Planner::new(bad, ParamSpace::unit(2).unwrap()).is_err());
}

#[test]
fn non_finite_and_foreign_tells_are_rejected() {
    let mut p = Planner::new(PlannerConfig::builtin(PlannerKind::Simplex, Goal::Minimize, 0), ParamSpace::unit(2).unwrap()).unwrap();
    let x = p.ask().unwrap();
    assert!(matches!(p.tell(&x, f64::NAN), Err(Error::NonFinite(_))));
    assert!(matches!(p.tell(&x, f64::INFINITY), Err(Error::NonFinite(_))));
    let outside = ParamVector::from(vec![1.5, 0.5]);
    assert!(matches!(p.tell(&outside, 1.0), Err(Error::Domain(_))));
    assert!(p.history().is_empty());
    // Warm-start data from anywhere in bounds is fine.
    p.tell(&ParamVector::from(vec![0.2, 0.2]), 3.0).unwrap();
    assert_eq!(p.history().len(), 1);
}

#[test]
fn planner_names_parse_with_aliases() {
    for kind in PlannerKind::ALL {
        assert_eq!(kind.name().parse::<PlannerKind>().unwrap(), kind);
    }
    assert_eq!("cma-es".parse::<PlannerKind>().unwrap(), PlannerKind::CmaEs);
    assert_eq!("Nelder_Mead".parse::<PlannerKind>().unwrap(), PlannerKind::Simplex);
    assert!("annealing".parse::<PlannerKind>().is_err());
}

#[test]
fn constant_custom_planner_repeats_its_point() {
    register_custom(CustomPlannerDef::new("test-constant").ask(|ctx| vec![0.25; ctx.space.dim()])).unwrap();
    let target = surface(SurfaceKind::Dejong);
    let c = optimize(&PlannerConfig::new("test-constant", Goal::Minimize, 0), &target, 25).unwrap();
    assert_eq!(c.observations.len(), 25);
    assert!(c.observations.iter().all(|o| o.params.as_slice() == [0.25, 0.25]));
    assert_eq!(c.planner, "test-constant");
}

#[test]
fn custom_planner_out_of_bounds_is_clipped() {
    register_custom(CustomPlannerDef::new("test-wild").ask(|_| vec![7.0, -7.0])).unwrap();
    let mut p = Planner::new(PlannerConfig::new("test-wild", Goal::Minimize, 0), ParamSpace::unit(2).unwrap()).unwrap();
    assert_eq!(p.ask().unwrap().as_slice(), &[1.0, 0.0]);
    register_custom(CustomPlannerDef::new("test-short").ask(|_| vec![0.5])).unwrap();
    let mut p = Planner::new(PlannerConfig::new("test-short", Goal::Minimize, 0), ParamSpace::unit(2).unwrap()).unwrap();
    assert!(matches!(p.ask(), Err(Error::Contract(_))));
}

#[test]
fn custom_registration_contract() {
    assert!(register_custom(CustomPlannerDef::new("test-no-ask")).is_err());
    assert!(register_custom(CustomPlannerDef::new("").ask(|_| vec![])).is_err());
    assert!(register_custom(CustomPlannerDef::new("Sobol").ask(|_| vec![])).is_err());
    let unknown = Planner::new(PlannerConfig::new("test-never-registered", Goal::Minimize, 0), ParamSpace::unit(1).unwrap());
    assert!(unknown.is_err());
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic distribution).
fn ks_p_value(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = (n * m / (n + m)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    if lambda < 0.2 {
        // The series converges badly here and the tail mass is 1 to double precision.
        return 1.0;
    }
    let q: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            let sign = if k as i64 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    (2.0 * q).clamp(0.0, 1.0)
}

#[test]
fn custom_random_sampler_matches_builtin() {
    use rand::Rng;
    register_custom(CustomPlannerDef::new("test-uniform").ask(|ctx| {
        ctx.space
            .params()
            .iter()
            .map(|p| ctx.rng.random_range(p.low..=p.high))
            .collect()
    }))
    .unwrap();
    let space = ParamSpace::uniform(2, -2.0, 3.0).unwrap();
    let target = FnObjective::new("flat", space, |_| 0.0);
    let marginals = |name: &str, seed: u64| -> Vec<Vec<f64>> {
        let c = optimize(&PlannerConfig::new(name, Goal::Minimize, seed), &target, 1000).unwrap();
        (0..2).map(|k| c.observations.iter().map(|o| o.params[k]).collect()).collect()
    };
    let custom = marginals("test-uniform", 1);
    let builtin = marginals("RandomSearch", 2);
    for k in 0..2 {
        let p = ks_p_value(custom[k].clone(), builtin[k].clone());
        assert!(p > 0.01, "axis {k}: p = {p}");
    }
}

#[test]
fn ks_oracle_detects_shifted_samples() {
    let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
    let b: Vec<f64> = a.iter().map(|x| x + 0.2).collect();
    assert!(ks_p_value(a.clone(), b) < 1e-6);
    assert!(ks_p_value(a.clone(), a) > 0.99);
}

#[test]
fn evolutionary_planners_beat_descent_on_rastrigin() {
    let target = surface(SurfaceKind::Rastrigin);
    let descent = median_best(PlannerKind::SteepestDescent, &target, 0..20, 300);
    for kind in [
        PlannerKind::DifferentialEvolution,
        PlannerKind::ParticleSwarm,
        PlannerKind::CmaEs,
        PlannerKind::Genetic,
    ] {
        let m = median_best(kind, &target, 0..20, 300);
        assert!(m < descent, "{kind}: median {m} vs descent {descent}");
    }
}

#[test]
fn gp_beats_random_on_dejong() {
    let target = surface(SurfaceKind::Dejong);
    let random = median_best(PlannerKind::RandomSearch, &target, 0..20, 200);
    let gp = median_best(PlannerKind::GpBayesOpt, &target, 0..20, 200);
    assert!(gp < random, "gp {gp} vs random {random}");
}
