//! Evolutionary solvers: shared configuration, selection and bookkeeping.
//!
//! Two encodings share one [`GaConfig`]: the direct solver evolves rosters
//! gene-by-gene, the indirect one evolves nurse orderings that a greedy
//! decoder turns into rosters. Runs are single-threaded and bit-reproducible
//! for a fixed (instance, config) pair; parallelism belongs to the caller,
//! one run per thread.

pub mod direct;
pub mod indirect;

use crate::problem::{ExtendedCost, Roster};
use crate::rng::SeededRng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaError {
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
}

/// Crossover operators. `Uniform` and `OnePoint` act gene-wise on rosters;
/// on permutations every kind maps to an order-preserving variant (see
/// [`indirect`]). `Automatic` is only meaningful for permutations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverKind {
    /// Each gene comes from the fitter parent with probability `bias`.
    Uniform { bias: f64 },
    /// Prefix from the fitter parent, remainder from the other.
    OnePoint,
    /// Order crossover: a contiguous segment survives, the rest follows the
    /// other parent's ordering. Permutations only.
    Order,
    /// Complement of `Order`: prefix and suffix survive, the middle follows
    /// the other parent's ordering. Permutations only.
    TwoPoint,
    /// Per-generation adaptive choice between `Order` and `TwoPoint` driven
    /// by recent offspring success. Permutations only.
    Automatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IslandConfig {
    /// Number of sub-populations; 1 disables the island model.
    #[serde(default = "default_island_count")]
    pub count: usize,
    /// Generations between migrations.
    #[serde(default = "default_migration_interval")]
    pub migration_interval: u32,
    /// Individuals sent to the next island in the ring per migration.
    #[serde(default = "default_migrants")]
    pub migrants: usize,
}

fn default_island_count() -> usize {
    1
}
fn default_migration_interval() -> u32 {
    25
}
fn default_migrants() -> usize {
    1
}

impl Default for IslandConfig {
    fn default() -> Self {
        Self {
            count: default_island_count(),
            migration_interval: default_migration_interval(),
            migrants: default_migrants(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_generations")]
    pub generations: u32,
    #[serde(default = "default_crossover")]
    pub crossover: CrossoverKind,
    /// Direct encoding: per-gene resample probability. Permutations: the
    /// probability of one position swap per offspring.
    #[serde(default = "default_mutation_rate")]
    pub mutation_rate: f64,
    /// Fraction of each (sub-)population carried over unchanged.
    #[serde(default = "default_elitism")]
    pub elitism: f64,
    #[serde(default)]
    pub islands: IslandConfig,
    /// Local search on the elite each generation (direct encoding only).
    #[serde(default)]
    pub hillclimber: bool,
    /// Adapt the decoder's cover weight during the run (indirect only).
    #[serde(default)]
    pub auto_weights: bool,
    #[serde(default = "default_w_demand")]
    pub w_demand: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_population() -> usize {
    100
}
fn default_generations() -> u32 {
    200
}
fn default_crossover() -> CrossoverKind {
    CrossoverKind::Uniform { bias: 0.8 }
}
fn default_mutation_rate() -> f64 {
    0.05
}
fn default_elitism() -> f64 {
    0.1
}
fn default_w_demand() -> f64 {
    200.0
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: default_population(),
            generations: default_generations(),
            crossover: default_crossover(),
            mutation_rate: default_mutation_rate(),
            elitism: default_elitism(),
            islands: IslandConfig::default(),
            hillclimber: false,
            auto_weights: false,
            w_demand: default_w_demand(),
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate_common(&self) -> Result<(), GaError> {
        let fail = |msg: String| Err(GaError::InvalidConfig(msg));
        if self.population_size < 2 {
            return fail(format!("population_size must be >= 2, got {}", self.population_size));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return fail(format!("mutation_rate must be in [0, 1], got {}", self.mutation_rate));
        }
        if !(0.0..=1.0).contains(&self.elitism) {
            return fail(format!("elitism must be in [0, 1], got {}", self.elitism));
        }
        if !(self.w_demand >= 0.0 && self.w_demand.is_finite()) {
            return fail(format!("w_demand must be finite and >= 0, got {}", self.w_demand));
        }
        if self.islands.count == 0 {
            return fail("islands.count must be >= 1".into());
        }
        if self.population_size / self.islands.count < 2 {
            return fail(format!(
                "population {} spread over {} islands leaves sub-populations below 2",
                self.population_size, self.islands.count
            ));
        }
        if let CrossoverKind::Uniform { bias } = self.crossover {
            if !(0.0..=1.0).contains(&bias) {
                return fail(format!("uniform crossover bias must be in [0, 1], got {bias}"));
            }
        }
        Ok(())
    }

    /// Validates the config for the direct (roster) encoding.
    pub fn validate_direct(&self) -> Result<(), GaError> {
        self.validate_common()?;
        match self.crossover {
            CrossoverKind::Uniform { .. } | CrossoverKind::OnePoint => {}
            other => {
                return Err(GaError::InvalidConfig(format!(
                    "crossover {other:?} applies to permutations, not the direct encoding"
                )));
            }
        }
        if self.auto_weights {
            return Err(GaError::InvalidConfig(
                "auto_weights adapts the decoder and applies to the indirect solver only".into(),
            ));
        }
        Ok(())
    }

    /// Validates the config for the indirect (permutation) encoding.
    pub fn validate_indirect(&self) -> Result<(), GaError> {
        self.validate_common()?;
        if self.hillclimber {
            return Err(GaError::InvalidConfig(
                "the hillclimber works on rosters and applies to the direct solver only".into(),
            ));
        }
        Ok(())
    }

    /// Sub-population sizes: the population split as evenly as possible.
    pub(crate) fn island_sizes(&self) -> Vec<usize> {
        let count = self.islands.count;
        let base = self.population_size / count;
        let remainder = self.population_size % count;
        (0..count).map(|i| base + usize::from(i < remainder)).collect()
    }

    /// Number of elites for a sub-population of the given size.
    pub(crate) fn elite_count(&self, island_size: usize) -> usize {
        if self.elitism == 0.0 {
            0
        } else {
            (((island_size as f64) * self.elitism).floor() as usize).clamp(1, island_size)
        }
    }
}

/// Outcome of one seeded solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// Best-ever outcome: any feasible roster outranks every infeasible one.
    pub best_cost: ExtendedCost,
    /// The best roster, present when a feasible one was found.
    pub best_roster: Option<Roster>,
    pub generations: u32,
    pub wall_time: Duration,
    pub seed: u64,
}

/// Tracks the best individual ever seen, ordered by feasibility first and
/// penalty fitness second, so a feasible roster always wins over an
/// infeasible one regardless of penalty values.
pub(crate) struct BestTracker {
    best: Option<(bool, f64, Roster)>,
}

impl BestTracker {
    pub fn new() -> Self {
        Self { best: None }
    }

    pub fn offer(&mut self, feasible: bool, fitness: f64, roster: &Roster) {
        let better = match &self.best {
            None => true,
            Some((best_feasible, best_fitness, _)) => {
                (feasible && !*best_feasible)
                    || (feasible == *best_feasible && fitness < *best_fitness)
            }
        };
        if better {
            self.best = Some((feasible, fitness, roster.clone()));
        }
    }

    pub fn into_result(
        self,
        generations: u32,
        wall_time: Duration,
        seed: u64,
        cost_of: impl Fn(&Roster) -> u32,
    ) -> TrialResult {
        let (best_cost, best_roster) = match self.best {
            Some((true, _, roster)) => {
                let cost = cost_of(&roster);
                (ExtendedCost::Feasible(cost), Some(roster))
            }
            _ => (ExtendedCost::Infeasible, None),
        };
        TrialResult {
            best_cost,
            best_roster,
            generations,
            wall_time,
            seed,
        }
    }
}

/// Cumulative linear-ranking selection weights for a population sorted best
/// first, with selective pressure 1.5: the best individual is 3x as likely
/// as the worst.
pub(crate) fn ranking_cumulative_weights(n: usize) -> Vec<f64> {
    const PRESSURE: f64 = 1.5;
    let n_f = n as f64;
    let mut cumulative = Vec::with_capacity(n);
    let mut total = 0.0;
    for sorted_index in 0..n {
        // sorted_index 0 is the best; standard linear ranking weight.
        let rank_from_worst = (n - 1 - sorted_index) as f64;
        let weight = if n == 1 {
            1.0
        } else {
            (2.0 - PRESSURE) + 2.0 * (PRESSURE - 1.0) * rank_from_worst / (n_f - 1.0)
        };
        total += weight;
        cumulative.push(total);
    }
    cumulative
}

/// Samples an index from cumulative weights.
pub(crate) fn pick_ranked(cumulative: &[f64], rng: &mut SeededRng) -> usize {
    let total = *cumulative.last().expect("non-empty weights");
    let draw: f64 = rng.gen_range(0.0..total);
    cumulative.partition_point(|&c| c <= draw).min(cumulative.len() - 1)
}

/// Ring migration: each island's `migrants` best individuals replace the
/// next island's worst. Populations must be sorted best first. A no-op for
/// a single island.
pub(crate) fn migrate_ring<T: Clone>(islands: &mut [Vec<T>], migrants: usize) {
    let count = islands.len();
    if count < 2 || migrants == 0 {
        return;
    }
    let emigrants: Vec<Vec<T>> = islands
        .iter()
        .map(|pop| pop[..migrants.min(pop.len())].to_vec())
        .collect();
    for (from, batch) in emigrants.into_iter().enumerate() {
        let to = (from + 1) % count;
        let pop = &mut islands[to];
        let keep = pop.len() - batch.len();
        pop.truncate(keep);
        pop.extend(batch);
    }
}
