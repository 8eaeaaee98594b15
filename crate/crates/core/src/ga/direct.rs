//! Direct-encoding solver: each individual is a roster, one feasible pattern
//! index per nurse. Genes are only ever drawn from the owning nurse's
//! feasible set, so the one-pattern-per-nurse constraint holds for every
//! individual that can exist; demand violations are priced into the penalty
//! fitness.

use super::{
    migrate_ring, pick_ranked, ranking_cumulative_weights, BestTracker, CrossoverKind, GaConfig,
    GaError, TrialResult,
};
use crate::problem::{roster_cost, total_shortfall, ProblemInstance, Roster, SLOT_COUNT};
use crate::rng::{rng_from_seed, SeededRng};
use rand::Rng;
use std::time::Instant;

/// Biased uniform crossover. `fitter` must be the fitter parent; each gene
/// comes from it with probability `bias`, otherwise from `other`.
pub fn uniform_crossover(
    fitter: &[usize],
    other: &[usize],
    bias: f64,
    rng: &mut SeededRng,
) -> Vec<usize> {
    debug_assert_eq!(fitter.len(), other.len());
    fitter
        .iter()
        .zip(other)
        .map(|(&a, &b)| if rng.gen_bool(bias) { a } else { b })
        .collect()
}

/// One-point crossover: prefix from `fitter` up to a cut in `1..n`, suffix
/// from `other`. A single-gene individual is copied from `fitter`.
pub fn one_point_crossover(fitter: &[usize], other: &[usize], rng: &mut SeededRng) -> Vec<usize> {
    debug_assert_eq!(fitter.len(), other.len());
    let n = fitter.len();
    if n == 1 {
        return fitter.to_vec();
    }
    let cut = rng.gen_range(1..n);
    let mut child = fitter[..cut].to_vec();
    child.extend_from_slice(&other[cut..]);
    child
}

/// Per-gene mutation: each gene is independently resampled uniformly from
/// the nurse's feasible set with probability `rate`.
pub fn mutate_direct(
    genes: &[usize],
    rate: f64,
    inst: &ProblemInstance,
    rng: &mut SeededRng,
) -> Vec<usize> {
    genes
        .iter()
        .enumerate()
        .map(|(i, &gene)| {
            if rate > 0.0 && rng.gen_bool(rate) {
                let set = inst.feasible_set(i);
                set[rng.gen_range(0..set.len())]
            } else {
                gene
            }
        })
        .collect()
}

/// First-improvement local search: scan nurses in index order, try each
/// feasible pattern in turn and accept the first penalty-reducing swap;
/// repeat until a full pass changes nothing. The result never has a higher
/// penalty fitness than the input.
pub fn hillclimb(inst: &ProblemInstance, roster: &Roster, w_demand: f64) -> Roster {
    let grades = inst.grade_count() as usize;
    let mut assignment = roster.assignment.clone();
    let mut cover = crate::problem::coverage(inst, roster);

    // Penalty delta of moving `nurse` from her current pattern to `to`,
    // evaluated against the current cover matrix. Slots lost and gained are
    // disjoint, so reading before mutating is sound.
    let delta = |cover: &[Vec<u32>], nurse: usize, from: usize, to: usize| -> f64 {
        let grade = inst.nurses()[nurse].grade as usize;
        let mut d = f64::from(inst.pref_cost(nurse, to)) - f64::from(inst.pref_cost(nurse, from));
        let from_pat = inst.pattern(from);
        let to_pat = inst.pattern(to);
        for k in 0..SLOT_COUNT {
            let was = from_pat.covers(k);
            let now = to_pat.covers(k);
            if was == now {
                continue;
            }
            for s in (grade - 1)..grades {
                if was {
                    // Losing one unit of cover adds shortfall iff demand was met tightly.
                    if cover[k][s] <= inst.demand(k, s) {
                        d += w_demand;
                    }
                } else if cover[k][s] < inst.demand(k, s) {
                    d -= w_demand;
                }
            }
        }
        d
    };

    let apply = |cover: &mut [Vec<u32>], nurse: usize, from: usize, to: usize| {
        let grade = inst.nurses()[nurse].grade as usize;
        for k in 0..SLOT_COUNT {
            let was = inst.pattern(from).covers(k);
            let now = inst.pattern(to).covers(k);
            if was == now {
                continue;
            }
            for s in (grade - 1)..grades {
                if was {
                    cover[k][s] -= 1;
                } else {
                    cover[k][s] += 1;
                }
            }
        }
    };

    loop {
        let mut changed = false;
        for nurse in 0..inst.nurse_count() {
            let current = assignment[nurse];
            for &candidate in inst.feasible_set(nurse) {
                if candidate == current {
                    continue;
                }
                if delta(&cover, nurse, current, candidate) < 0.0 {
                    apply(&mut cover, nurse, current, candidate);
                    assignment[nurse] = candidate;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            return Roster::new(assignment);
        }
    }
}

#[derive(Clone)]
struct Individual {
    genes: Vec<usize>,
    fitness: f64,
}

/// Runs the direct solver: generational loop with linear-ranking selection,
/// elitism, optional elite hillclimbing and an optional island model.
/// Deterministic for a fixed (instance, config) pair.
pub fn run_direct_ga(inst: &ProblemInstance, cfg: &GaConfig) -> Result<TrialResult, GaError> {
    run_direct_ga_observed(inst, cfg, |_, _| {})
}

/// As [`run_direct_ga`], invoking `observer(generation, best_fitness)` with
/// the population-wide best penalty fitness after every generation.
pub fn run_direct_ga_observed(
    inst: &ProblemInstance,
    cfg: &GaConfig,
    mut observer: impl FnMut(u32, f64),
) -> Result<TrialResult, GaError> {
    cfg.validate_direct()?;
    let started = Instant::now();
    let mut rng = rng_from_seed(cfg.seed);
    let mut tracker = BestTracker::new();

    let evaluate = |genes: Vec<usize>, tracker: &mut BestTracker| -> Individual {
        let roster = Roster::new(genes);
        let shortfall = total_shortfall(inst, &roster);
        let fitness =
            f64::from(roster_cost(inst, &roster)) + cfg.w_demand * f64::from(shortfall);
        tracker.offer(shortfall == 0, fitness, &roster);
        Individual {
            genes: roster.assignment,
            fitness,
        }
    };

    let random_genes = |rng: &mut SeededRng| -> Vec<usize> {
        (0..inst.nurse_count())
            .map(|i| {
                let set = inst.feasible_set(i);
                set[rng.gen_range(0..set.len())]
            })
            .collect()
    };

    let mut islands: Vec<Vec<Individual>> = cfg
        .island_sizes()
        .into_iter()
        .map(|size| {
            (0..size)
                .map(|_| {
                    let genes = random_genes(&mut rng);
                    evaluate(genes, &mut tracker)
                })
                .collect()
        })
        .collect();

    for generation in 1..=cfg.generations {
        for island in islands.iter_mut() {
            island.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
            let elite = cfg.elite_count(island.len());

            if cfg.hillclimber {
                for slot in island.iter_mut().take(elite) {
                    let improved = hillclimb(inst, &Roster::new(slot.genes.clone()), cfg.w_demand);
                    let refined = evaluate(improved.assignment, &mut tracker);
                    if refined.fitness < slot.fitness {
                        *slot = refined;
                    }
                }
                island[..elite].sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
            }

            let weights = ranking_cumulative_weights(island.len());
            let mut offspring = Vec::with_capacity(island.len() - elite);
            while offspring.len() < island.len() - elite {
                let first = pick_ranked(&weights, &mut rng);
                let second = pick_ranked(&weights, &mut rng);
                // The population is sorted, so the smaller index is fitter.
                let (fit, other) = (first.min(second), first.max(second));
                let child = match cfg.crossover {
                    CrossoverKind::Uniform { bias } => {
                        uniform_crossover(&island[fit].genes, &island[other].genes, bias, &mut rng)
                    }
                    CrossoverKind::OnePoint => {
                        one_point_crossover(&island[fit].genes, &island[other].genes, &mut rng)
                    }
                    _ => unreachable!("validated for the direct encoding"),
                };
                let child = mutate_direct(&child, cfg.mutation_rate, inst, &mut rng);
                offspring.push(evaluate(child, &mut tracker));
            }
            island.truncate(elite);
            island.extend(offspring);
        }

        if cfg.islands.count > 1 && generation % cfg.islands.migration_interval == 0 {
            for island in islands.iter_mut() {
                island.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
            }
            migrate_ring(&mut islands, cfg.islands.migrants);
        }

        let generation_best = islands
            .iter()
            .flat_map(|island| island.iter().map(|ind| ind.fitness))
            .fold(f64::INFINITY, f64::min);
        observer(generation, generation_best);
    }

    Ok(tracker.into_result(cfg.generations, started.elapsed(), cfg.seed, |roster| {
        roster_cost(inst, roster)
    }))
}
