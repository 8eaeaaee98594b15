//! Indirect solver: evolve an ordering of the nurses; a greedy decoder
//! schedules them in that order, scoring each candidate pattern on residual
//! demand cover and preference cost. Crossover and mutation are
//! permutation-safe throughout.

use super::{
    migrate_ring, pick_ranked, ranking_cumulative_weights, BestTracker, CrossoverKind, GaConfig,
    GaError, TrialResult,
};
use crate::problem::{is_feasible, roster_cost, total_shortfall, ProblemInstance, Roster, SLOT_COUNT};
use crate::rng::{rng_from_seed, SeededRng};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// A processing order over the nurses: contains each index exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NursePermutation {
    pub order: Vec<usize>,
}

impl NursePermutation {
    pub fn identity(n: usize) -> Self {
        Self { order: (0..n).collect() }
    }

    pub fn random(n: usize, rng: &mut SeededRng) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Self { order }
    }

    pub fn is_valid(&self) -> bool {
        let n = self.order.len();
        let mut seen = vec![false; n];
        self.order.iter().all(|&i| {
            if i < n && !seen[i] {
                seen[i] = true;
                true
            } else {
                false
            }
        })
    }
}

/// What the decoder optimizes when picking a pattern for the next nurse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderMode {
    /// Cheapest pattern, demand ignored.
    LowestCost,
    /// Pattern covering the most residual demand, cost ignored.
    MostUncovered,
    /// Weighted blend: `w_cover * covered - w_cost * cost`.
    Combined,
}

/// How much construction intelligence the decoder applies on top of the mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    None,
    Greedy,
    /// Adds a criticality bonus for slots whose residual demand could no
    /// longer be met by the remaining unscheduled nurses.
    LookAhead,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConfig {
    pub mode: DecoderMode,
    /// Weight per unit of covered residual demand; `None` derives it from
    /// the instance as the mean preference cost (at least 1).
    #[serde(default)]
    pub w_cover: Option<f64>,
    #[serde(default = "default_w_cost")]
    pub w_cost: f64,
    #[serde(default = "default_bound")]
    pub bound: BoundKind,
}

fn default_w_cost() -> f64 {
    1.0
}
fn default_bound() -> BoundKind {
    BoundKind::Greedy
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            mode: DecoderMode::Combined,
            w_cover: None,
            w_cost: default_w_cost(),
            bound: BoundKind::LookAhead,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        if let Some(w) = self.w_cover {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(GaError::InvalidConfig(format!(
                    "decoder w_cover must be finite and >= 0, got {w}"
                )));
            }
        }
        if !(self.w_cost >= 0.0 && self.w_cost.is_finite()) {
            return Err(GaError::InvalidConfig(format!(
                "decoder w_cost must be finite and >= 0, got {}",
                self.w_cost
            )));
        }
        Ok(())
    }

    /// The cover weight actually used on `inst`.
    pub fn resolved_w_cover(&self, inst: &ProblemInstance) -> f64 {
        self.w_cover.unwrap_or_else(|| inst.mean_pref_cost().max(1.0))
    }
}

/// Builds a roster by scheduling nurses in permutation order.
///
/// Residual demand starts at the instance demand and drops (floored at zero)
/// across every qualified grade row as nurses are placed. Each nurse gets
/// the feasible pattern with the highest score under the configured mode;
/// with `BoundKind::LookAhead` a pattern earns an extra `w_cover` per covered
/// slot where some qualified residual cell exceeds what the remaining
/// unscheduled nurses could still provide. Ties break to the cheaper
/// pattern, then the lower index. Fully deterministic.
pub fn decode(perm: &NursePermutation, inst: &ProblemInstance, dcfg: &DecoderConfig) -> Roster {
    let grades = inst.grade_count() as usize;
    let n = inst.nurse_count();
    debug_assert_eq!(perm.order.len(), n);
    let w_cover = dcfg.resolved_w_cover(inst);

    let mut residual: Vec<Vec<u32>> = inst.demand_rows().to_vec();
    let mut assignment = vec![0usize; n];

    // Per nurse: which slots any feasible pattern could cover.
    let can_cover: Vec<[bool; SLOT_COUNT]> = (0..n)
        .map(|i| {
            let mut cover = [false; SLOT_COUNT];
            for &j in inst.feasible_set(i) {
                for k in inst.pattern(j).covered_slots() {
                    cover[k] = true;
                }
            }
            cover
        })
        .collect();
    // capable[k][s]: unscheduled nurses qualified for grade row s that can
    // still cover slot k.
    let mut capable = vec![vec![0u32; grades]; SLOT_COUNT];
    for i in 0..n {
        let grade = inst.nurses()[i].grade as usize;
        for k in 0..SLOT_COUNT {
            if can_cover[i][k] {
                for cell in capable[k].iter_mut().skip(grade - 1) {
                    *cell += 1;
                }
            }
        }
    }

    for &nurse in &perm.order {
        let grade = inst.nurses()[nurse].grade as usize;

        // The nurse being placed no longer counts as "remaining".
        for k in 0..SLOT_COUNT {
            if can_cover[nurse][k] {
                for cell in capable[k].iter_mut().skip(grade - 1) {
                    *cell -= 1;
                }
            }
        }

        let mut best: Option<(f64, u32, usize)> = None;
        for &j in inst.feasible_set(nurse) {
            let pattern = inst.pattern(j);
            let cost = inst.pref_cost(nurse, j);

            let mut covered_units = 0u32;
            let mut critical_slots = 0u32;
            for k in pattern.covered_slots() {
                let mut slot_critical = false;
                for s in (grade - 1)..grades {
                    if residual[k][s] > 0 {
                        covered_units += 1;
                        if residual[k][s] > capable[k][s] {
                            slot_critical = true;
                        }
                    }
                }
                critical_slots += u32::from(slot_critical);
            }

            let mut score = match dcfg.mode {
                DecoderMode::LowestCost => -f64::from(cost),
                DecoderMode::MostUncovered => f64::from(covered_units),
                DecoderMode::Combined => {
                    w_cover * f64::from(covered_units) - dcfg.w_cost * f64::from(cost)
                }
            };
            if dcfg.bound == BoundKind::LookAhead {
                score += w_cover * f64::from(critical_slots);
            }

            let candidate = (score, cost, j);
            let better = match best {
                None => true,
                Some((best_score, best_cost, best_j)) => {
                    score > best_score
                        || (score == best_score
                            && (cost < best_cost || (cost == best_cost && j < best_j)))
                }
            };
            if better {
                best = Some(candidate);
            }
        }

        let (_, _, chosen) = best.expect("feasible sets are nonempty");
        assignment[nurse] = chosen;
        for k in inst.pattern(chosen).covered_slots() {
            for cell in residual[k].iter_mut().skip(grade - 1) {
                *cell = cell.saturating_sub(1);
            }
        }
    }

    Roster::new(assignment)
}

/// Order crossover (OX1): keep a random contiguous segment of the fitter
/// parent in place; fill the remaining positions left to right with the
/// other parent's elements in their order, skipping duplicates.
pub fn order_crossover(
    fitter: &NursePermutation,
    other: &NursePermutation,
    rng: &mut SeededRng,
) -> NursePermutation {
    let n = fitter.order.len();
    let (lo, hi) = random_segment(n, rng);
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for pos in lo..=hi {
        let gene = fitter.order[pos];
        child[pos] = gene;
        used[gene] = true;
    }
    fill_gaps(&mut child, &mut used, &other.order);
    NursePermutation { order: child }
}

/// Two-point order crossover: the complement of OX1. Prefix and suffix of
/// the fitter parent survive; the middle is filled with the other parent's
/// elements in their order.
pub fn two_point_order_crossover(
    fitter: &NursePermutation,
    other: &NursePermutation,
    rng: &mut SeededRng,
) -> NursePermutation {
    let n = fitter.order.len();
    let (lo, hi) = random_segment(n, rng);
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for pos in (0..lo).chain(hi + 1..n) {
        let gene = fitter.order[pos];
        child[pos] = gene;
        used[gene] = true;
    }
    fill_gaps(&mut child, &mut used, &other.order);
    NursePermutation { order: child }
}

/// Uniform order crossover: each position keeps the fitter parent's element
/// with probability `bias`; the remaining positions are filled with the
/// missing elements in the other parent's order.
pub fn uniform_order_crossover(
    fitter: &NursePermutation,
    other: &NursePermutation,
    bias: f64,
    rng: &mut SeededRng,
) -> NursePermutation {
    let n = fitter.order.len();
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for pos in 0..n {
        if rng.gen_bool(bias) {
            let gene = fitter.order[pos];
            child[pos] = gene;
            used[gene] = true;
        }
    }
    fill_gaps(&mut child, &mut used, &other.order);
    NursePermutation { order: child }
}

/// One-point order crossover: a prefix of the fitter parent survives, the
/// rest follows the other parent's ordering.
pub fn one_point_order_crossover(
    fitter: &NursePermutation,
    other: &NursePermutation,
    rng: &mut SeededRng,
) -> NursePermutation {
    let n = fitter.order.len();
    if n == 1 {
        return fitter.clone();
    }
    let cut = rng.gen_range(1..n);
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for pos in 0..cut {
        let gene = fitter.order[pos];
        child[pos] = gene;
        used[gene] = true;
    }
    fill_gaps(&mut child, &mut used, &other.order);
    NursePermutation { order: child }
}

fn random_segment(n: usize, rng: &mut SeededRng) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    (a.min(b), a.max(b))
}

fn fill_gaps(child: &mut [usize], used: &mut [bool], donor_order: &[usize]) {
    let mut donor = donor_order.iter().filter(|&&g| !used[g]);
    for slot in child.iter_mut() {
        if *slot == usize::MAX {
            *slot = *donor.next().expect("donor supplies every missing gene");
        }
    }
}

/// With probability `rate`, swaps two distinct uniformly chosen positions.
/// Identity for `n < 2` and always returns a valid permutation.
pub fn swap_mutation(perm: &NursePermutation, rate: f64, rng: &mut SeededRng) -> NursePermutation {
    let n = perm.order.len();
    let mut out = perm.clone();
    if n >= 2 && rate > 0.0 && rng.gen_bool(rate) {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        out.order.swap(a, b);
    }
    out
}

#[derive(Clone)]
struct Individual {
    perm: NursePermutation,
    roster: Roster,
    fitness: f64,
}

/// Per-generation crossover arm chosen by `CrossoverKind::Automatic`:
/// epsilon-greedy over OX1 and the two-point variant, scored by the decayed
/// fraction of offspring that beat their parents' mean fitness.
struct OperatorStats {
    successes: [f64; 2],
    trials: [f64; 2],
}

impl OperatorStats {
    const EPSILON: f64 = 0.1;
    const DECAY: f64 = 0.5;

    fn new() -> Self {
        Self { successes: [0.0; 2], trials: [0.0; 2] }
    }

    fn choose(&self, rng: &mut SeededRng) -> usize {
        if rng.gen_bool(Self::EPSILON) {
            return rng.gen_range(0..2);
        }
        let rate = |arm: usize| {
            if self.trials[arm] == 0.0 {
                // Untried arms look maximally promising.
                1.0
            } else {
                self.successes[arm] / self.trials[arm]
            }
        };
        if rate(1) > rate(0) {
            1
        } else {
            0
        }
    }

    fn decay(&mut self) {
        for arm in 0..2 {
            self.successes[arm] *= Self::DECAY;
            self.trials[arm] *= Self::DECAY;
        }
    }

    fn record(&mut self, arm: usize, success: bool) {
        self.trials[arm] += 1.0;
        self.successes[arm] += f64::from(success);
    }
}

/// Runs the indirect solver. Structure mirrors [`super::direct::run_direct_ga`]
/// with a permutation genotype: fitness is the penalty fitness of the decoded
/// roster. Individuals cache the roster decoded at their creation, so
/// adaptive cover weights (`auto_weights`) only influence offspring.
pub fn run_indirect_ga(
    inst: &ProblemInstance,
    cfg: &GaConfig,
    dcfg: &DecoderConfig,
) -> Result<TrialResult, GaError> {
    run_indirect_ga_observed(inst, cfg, dcfg, |_, _| {})
}

/// As [`run_indirect_ga`], invoking `observer(generation, best_fitness)` with
/// the population-wide best penalty fitness after every generation.
pub fn run_indirect_ga_observed(
    inst: &ProblemInstance,
    cfg: &GaConfig,
    dcfg: &DecoderConfig,
    mut observer: impl FnMut(u32, f64),
) -> Result<TrialResult, GaError> {
    cfg.validate_indirect()?;
    dcfg.validate()?;
    let started = Instant::now();
    let mut rng = rng_from_seed(cfg.seed);
    let mut tracker = BestTracker::new();
    let n = inst.nurse_count();

    let mut decoder = *dcfg;
    decoder.w_cover = Some(dcfg.resolved_w_cover(inst));

    let evaluate = |perm: NursePermutation,
                    decoder: &DecoderConfig,
                    tracker: &mut BestTracker|
     -> Individual {
        let roster = decode(&perm, inst, decoder);
        let shortfall = total_shortfall(inst, &roster);
        let fitness =
            f64::from(roster_cost(inst, &roster)) + cfg.w_demand * f64::from(shortfall);
        tracker.offer(shortfall == 0, fitness, &roster);
        Individual { perm, roster, fitness }
    };

    let mut islands: Vec<Vec<Individual>> = cfg
        .island_sizes()
        .into_iter()
        .map(|size| {
            (0..size)
                .map(|_| {
                    let perm = NursePermutation::random(n, &mut rng);
                    evaluate(perm, &decoder, &mut tracker)
                })
                .collect()
        })
        .collect();

    let mut stats = OperatorStats::new();

    for generation in 1..=cfg.generations {
        let auto_arm = match cfg.crossover {
            CrossoverKind::Automatic => Some(stats.choose(&mut rng)),
            _ => None,
        };
        if auto_arm.is_some() {
            stats.decay();
        }

        for island in islands.iter_mut() {
            island.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
            let elite = cfg.elite_count(island.len());
            let weights = ranking_cumulative_weights(island.len());
            let mut offspring = Vec::with_capacity(island.len() - elite);
            while offspring.len() < island.len() - elite {
                let first = pick_ranked(&weights, &mut rng);
                let second = pick_ranked(&weights, &mut rng);
                let (fit, other) = (first.min(second), first.max(second));
                let parents_mean = (island[fit].fitness + island[other].fitness) / 2.0;
                let child = match (cfg.crossover, auto_arm) {
                    (_, Some(0)) => order_crossover(&island[fit].perm, &island[other].perm, &mut rng),
                    (_, Some(_)) => {
                        two_point_order_crossover(&island[fit].perm, &island[other].perm, &mut rng)
                    }
                    (CrossoverKind::Uniform { bias }, _) => {
                        uniform_order_crossover(&island[fit].perm, &island[other].perm, bias, &mut rng)
                    }
                    (CrossoverKind::OnePoint, _) => {
                        one_point_order_crossover(&island[fit].perm, &island[other].perm, &mut rng)
                    }
                    (CrossoverKind::Order, _) => {
                        order_crossover(&island[fit].perm, &island[other].perm, &mut rng)
                    }
                    (CrossoverKind::TwoPoint, _) => {
                        two_point_order_crossover(&island[fit].perm, &island[other].perm, &mut rng)
                    }
                    (CrossoverKind::Automatic, None) => unreachable!("arm chosen above"),
                };
                let child = swap_mutation(&child, cfg.mutation_rate, &mut rng);
                let child = evaluate(child, &decoder, &mut tracker);
                if let Some(arm) = auto_arm {
                    stats.record(arm, child.fitness < parents_mean);
                }
                offspring.push(child);
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

        let best = islands
            .iter()
            .flat_map(|island| island.iter())
            .min_by(|a, b| a.fitness.total_cmp(&b.fitness))
            .expect("populations are non-empty");
        if cfg.auto_weights {
            let w = decoder.w_cover.expect("resolved above");
            let adjusted = if is_feasible(inst, &best.roster) { w * 0.95 } else { w * 1.1 };
            decoder.w_cover = Some(adjusted.clamp(1.0, 1e4));
        }
        let generation_best = best.fitness;
        observer(generation, generation_best);
    }

    Ok(tracker.into_result(cfg.generations, started.elapsed(), cfg.seed, |roster| {
        roster_cost(inst, roster)
    }))
}
