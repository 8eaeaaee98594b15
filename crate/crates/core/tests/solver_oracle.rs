//! Cross-checks between the evolutionary solvers and the exact
//! branch-and-bound oracle on generated tiny instances.

use rostering_core::exact::{exact_solve, ExactOutcome, SolveLimits};
use rostering_core::ga::direct::run_direct_ga;
use rostering_core::ga::indirect::{run_indirect_ga, DecoderConfig};
use rostering_core::ga::GaConfig;
use rostering_core::instances::{generate_instance, GeneratorConfig};
use rostering_core::problem::ExtendedCost;

fn short_cfg(seed: u64) -> GaConfig {
    let mut cfg = GaConfig::default().with_seed(seed);
    cfg.population_size = 40;
    cfg.generations = 60;
    cfg
}

#[test]
fn ga_results_never_beat_the_exact_optimum() {
    for instance_seed in 0..6 {
        let inst = generate_instance(&GeneratorConfig::tiny(instance_seed)).unwrap();
        let optimum = match exact_solve(&inst, SolveLimits::default()) {
            ExactOutcome::Optimal { cost, .. } => cost,
            other => panic!("tiny instance should solve exactly, got {other:?}"),
        };
        for trial_seed in 0..3 {
            let direct = run_direct_ga(&inst, &short_cfg(trial_seed)).unwrap();
            if let ExtendedCost::Feasible(cost) = direct.best_cost {
                assert!(cost >= optimum, "direct found {cost} below optimum {optimum}");
            }
            let indirect =
                run_indirect_ga(&inst, &short_cfg(trial_seed), &DecoderConfig::default()).unwrap();
            if let ExtendedCost::Feasible(cost) = indirect.best_cost {
                assert!(cost >= optimum, "indirect found {cost} below optimum {optimum}");
            }
        }
    }
}

#[test]
fn direct_ga_reaches_the_optimum_on_most_tiny_trials() {
    // Smoke-scale version of the solver sanity gate: a handful of instances
    // and seeds, majority optimum hits expected.
    let mut hits = 0u32;
    let mut total = 0u32;
    for instance_seed in 0..4 {
        let inst = generate_instance(&GeneratorConfig::tiny(instance_seed)).unwrap();
        let optimum = match exact_solve(&inst, SolveLimits::default()) {
            ExactOutcome::Optimal { cost, .. } => cost,
            other => panic!("expected optimal, got {other:?}"),
        };
        for trial_seed in 0..5 {
            total += 1;
            let result = run_direct_ga(&inst, &short_cfg(trial_seed)).unwrap();
            if result.best_cost == ExtendedCost::Feasible(optimum) {
                hits += 1;
            }
        }
    }
    assert!(hits * 2 > total, "only {hits}/{total} trials reached the optimum");
}

#[test]
fn generated_instances_admit_feasible_rosters_found_by_both_solvers() {
    let inst = generate_instance(&GeneratorConfig::tiny(11)).unwrap();
    let direct = run_direct_ga(&inst, &short_cfg(0)).unwrap();
    let indirect = run_indirect_ga(&inst, &short_cfg(0), &DecoderConfig::default()).unwrap();
    assert!(direct.best_cost.is_feasible());
    assert!(indirect.best_cost.is_feasible());
}
