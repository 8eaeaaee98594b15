//! Infeasibility-aware comparison of stochastic solvers.
//!
//! Two algorithms are compared on one instance by scoring every ordered pair
//! of trial outcomes with [`pair_d`] and averaging over all pairs
//! ([`compute_e`]). The resulting E measure lies in `[-1, 1]`, is
//! antisymmetric, and is defined even when trials end infeasible: a feasible
//! outcome beats an infeasible one outright, two infeasible outcomes tie.
//!
//! The `alpha` weight discounts feasible-vs-feasible wins relative to
//! feasible-vs-infeasible ones; `alpha = 1` treats them alike.
//!
//! Per-instance rankings are derived from pairwise E signs with Copeland
//! scores, which stay well-defined when the "typically better than" relation
//! is cyclic; ties get mid-ranks. Significance across instances comes from
//! Friedman, Wilcoxon signed-rank and sign tests in [`nonparametric`].

pub mod dist;
pub mod nonparametric;
mod report;

pub use nonparametric::{friedman, sign_test, wilcoxon_signed_rank, FriedmanOutcome, TestOutcome};
pub use report::{overall_comparison, ComparisonReport, IntransitiveTriple, PairwiseTests};

use crate::problem::ExtendedCost;
use serde::Serialize;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("alpha must be in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("trial sets compare different instances: {a:?} vs {b:?}")]
    InstanceMismatch { a: String, b: String },
    #[error("trial set for algorithm {algorithm:?} on instance {instance:?} is empty")]
    EmptyTrialSet { algorithm: String, instance: String },
    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("rank matrix row {row} is not a mid-rank vector over 1..={k}: {reason}")]
    BadRankRow { row: usize, k: usize, reason: String },
    #[error("rank matrix rows have differing lengths: row {row} has {got}, expected {expected}")]
    RaggedRankMatrix {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("input values must be finite numbers")]
    NonFiniteValue,
    #[error("empty input")]
    EmptyInput,
    #[error("missing trial sets for {0:?} (algorithm, instance) cells")]
    IncompleteGrid(Vec<(String, String)>),
    #[error("duplicate trial set for algorithm {algorithm:?} on instance {instance:?}")]
    DuplicateTrialSet { algorithm: String, instance: String },
}

/// The comparison weight for feasible-vs-feasible outcomes, validated to
/// `[0, 1]` at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Alpha(f64);

impl Alpha {
    pub const ONE: Alpha = Alpha(1.0);

    pub fn new(value: f64) -> Result<Self, StatsError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Alpha(value))
        } else {
            Err(StatsError::InvalidAlpha(value))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The outcomes of repeated seeded trials of one algorithm on one instance.
/// Order carries no meaning for any downstream statistic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialSet {
    pub algorithm: String,
    pub instance: String,
    pub costs: Vec<ExtendedCost>,
}

impl TrialSet {
    pub fn new(
        algorithm: impl Into<String>,
        instance: impl Into<String>,
        costs: Vec<ExtendedCost>,
    ) -> Self {
        Self {
            algorithm: algorithm.into(),
            instance: instance.into(),
            costs,
        }
    }
}

/// Scores one ordered pair of trial outcomes:
///
/// * `+1` — `a` feasible, `b` infeasible (and `-1` for the mirror case);
/// * `+alpha` / `-alpha` — both feasible, strictly cheaper / dearer;
/// * `0` — equal costs, or both infeasible.
pub fn pair_d(a: ExtendedCost, b: ExtendedCost, alpha: Alpha) -> f64 {
    use ExtendedCost::*;
    match (a, b) {
        (Feasible(_), Infeasible) => 1.0,
        (Infeasible, Feasible(_)) => -1.0,
        (Infeasible, Infeasible) => 0.0,
        (Feasible(x), Feasible(y)) => match x.cmp(&y) {
            Ordering::Less => alpha.value(),
            Ordering::Greater => -alpha.value(),
            Ordering::Equal => 0.0,
        },
    }
}

/// The E measure: mean of [`pair_d`] over all `K x L` ordered trial pairs.
/// Antisymmetric in its arguments and confined to `[-1, 1]`.
pub fn compute_e(a: &TrialSet, b: &TrialSet, alpha: Alpha) -> Result<f64, StatsError> {
    if a.instance != b.instance {
        return Err(StatsError::InstanceMismatch {
            a: a.instance.clone(),
            b: b.instance.clone(),
        });
    }
    for set in [a, b] {
        if set.costs.is_empty() {
            return Err(StatsError::EmptyTrialSet {
                algorithm: set.algorithm.clone(),
                instance: set.instance.clone(),
            });
        }
    }
    // Tally wins minus losses separately for feasible-vs-feasible and
    // feasible-vs-infeasible pairs; the weighted mean is then exactly
    // antisymmetric, which a per-pair float sum is not.
    let mut ff_net: i64 = 0;
    let mut fi_net: i64 = 0;
    for &ca in &a.costs {
        for &cb in &b.costs {
            use ExtendedCost::*;
            match (ca, cb) {
                (Feasible(x), Feasible(y)) => {
                    ff_net += i64::from(x < y) - i64::from(x > y);
                }
                (Feasible(_), Infeasible) => fi_net += 1,
                (Infeasible, Feasible(_)) => fi_net -= 1,
                (Infeasible, Infeasible) => {}
            }
        }
    }
    let pairs = (a.costs.len() * b.costs.len()) as f64;
    Ok((alpha.value() * ff_net as f64 + fi_net as f64) / pairs)
}

/// Antisymmetric matrix of pairwise E values for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct EMatrix {
    pub instance: String,
    pub algorithms: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl EMatrix {
    /// Builds the matrix from one trial set per algorithm (all on the same
    /// instance). Antisymmetry holds by construction: each unordered pair is
    /// evaluated once and mirrored with its negation.
    pub fn from_trial_sets(sets: &[TrialSet], alpha: Alpha) -> Result<Self, StatsError> {
        if sets.is_empty() {
            return Err(StatsError::EmptyInput);
        }
        let instance = sets[0].instance.clone();
        let k = sets.len();
        let mut values = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let e = compute_e(&sets[i], &sets[j], alpha)?;
                values[i][j] = e;
                values[j][i] = -e;
            }
        }
        Ok(Self {
            instance,
            algorithms: sets.iter().map(|s| s.algorithm.clone()).collect(),
            values,
        })
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Copeland score per algorithm: net count of positive-E wins.
    pub fn copeland_scores(&self) -> Vec<i64> {
        let k = self.algorithms.len();
        (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let e = self.values[i][j];
                        i64::from(e > 0.0) - i64::from(e < 0.0)
                    })
                    .sum()
            })
            .collect()
    }

    /// Unordered algorithm triples whose pairwise "typically better"
    /// relation is cyclic (a beats b, b beats c, c beats a).
    pub fn intransitive_triples(&self) -> Vec<[usize; 3]> {
        let k = self.algorithms.len();
        let beats = |i: usize, j: usize| self.values[i][j] > 0.0;
        let mut out = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    let cycle = (beats(a, b) && beats(b, c) && beats(c, a))
                        || (beats(a, c) && beats(c, b) && beats(b, a));
                    if cycle {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }
}

/// Ranks algorithms on one instance: Copeland scores from pairwise E signs,
/// then ranks `1..=K` with 1 the worst and mid-ranks for tied scores.
pub fn rank_instance(sets: &[TrialSet], alpha: Alpha) -> Result<Vec<f64>, StatsError> {
    if sets.len() < 2 {
        return Err(StatsError::TooFew {
            what: "algorithms",
            needed: 2,
            got: sets.len(),
        });
    }
    let matrix = EMatrix::from_trial_sets(sets, alpha)?;
    let scores = matrix.copeland_scores();
    Ok(midranks_ascending(&scores))
}

/// Positions `1..=n` in ascending order of the keys, averaging positions over
/// tied groups. Output is aligned with the input.
pub fn midranks_ascending<T: PartialOrd + Copy>(keys: &[T]) -> Vec<f64> {
    let n = keys.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && keys[order[end]] == keys[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share the mid-rank.
        let mid = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = mid;
        }
        start = end;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExtendedCost::{Feasible, Infeasible};

    fn set(name: &str, costs: &[Option<u32>]) -> TrialSet {
        TrialSet::new(
            name,
            "p",
            costs.iter().map(|c| c.map_or(Infeasible, Feasible)).collect(),
        )
    }

    fn worked_example() -> (TrialSet, TrialSet, TrialSet) {
        let alg3 = set(
            "ALG3",
            &[Some(1), Some(1), Some(1), Some(2), Some(3), Some(3), Some(3), Some(4), Some(5), Some(5)],
        );
        let alg4 = set(
            "ALG4",
            &[Some(2), Some(4), Some(5), Some(5), Some(6), Some(7), Some(8), Some(8), None, None],
        );
        let alg5 = set(
            "ALG5",
            &[Some(3), Some(4), Some(5), Some(8), Some(9), Some(10), Some(10), None, None, None],
        );
        (alg3, alg4, alg5)
    }

    #[test]
    fn pair_d_cases() {
        let half = Alpha::new(0.5).unwrap();
        assert_eq!(pair_d(Feasible(3), Infeasible, half), 1.0);
        assert_eq!(pair_d(Infeasible, Feasible(3), half), -1.0);
        assert_eq!(pair_d(Infeasible, Infeasible, half), 0.0);
        assert_eq!(pair_d(Feasible(2), Feasible(5), half), 0.5);
        assert_eq!(pair_d(Feasible(5), Feasible(2), half), -0.5);
        assert_eq!(pair_d(Feasible(5), Feasible(5), half), 0.0);
        // alpha = 1 recovers the plain three-valued score.
        assert_eq!(pair_d(Feasible(2), Feasible(5), Alpha::ONE), 1.0);
    }

    #[test]
    fn alpha_is_validated() {
        assert!(Alpha::new(0.0).is_ok());
        assert!(Alpha::new(1.0).is_ok());
        assert_eq!(Alpha::new(1.1).unwrap_err(), StatsError::InvalidAlpha(1.1));
        assert_eq!(Alpha::new(-0.1).unwrap_err(), StatsError::InvalidAlpha(-0.1));
        assert!(Alpha::new(f64::NAN).is_err());
    }

    #[test]
    fn worked_example_e_values() {
        let (alg3, alg4, alg5) = worked_example();
        assert_eq!(compute_e(&alg3, &alg4, Alpha::ONE).unwrap(), 0.78);
        assert_eq!(compute_e(&alg3, &alg5, Alpha::ONE).unwrap(), 0.84);
        // The pairwise tallies behind 0.78: 86 wins, 6 ties, 8 losses.
        let mut wins = 0;
        let mut ties = 0;
        let mut losses = 0;
        for &a in &alg3.costs {
            for &b in &alg4.costs {
                match pair_d(a, b, Alpha::ONE) {
                    d if d > 0.0 => wins += 1,
                    d if d < 0.0 => losses += 1,
                    _ => ties += 1,
                }
            }
        }
        assert_eq!((wins, ties, losses), (86, 6, 8));
    }

    #[test]
    fn e_is_antisymmetric_and_zero_on_self() {
        let (alg3, alg4, _) = worked_example();
        let e = compute_e(&alg3, &alg4, Alpha::ONE).unwrap();
        let back = compute_e(&alg4, &alg3, Alpha::ONE).unwrap();
        assert_eq!(e, -back);
        assert_eq!(compute_e(&alg3, &alg3, Alpha::ONE).unwrap(), 0.0);
    }

    #[test]
    fn e_requires_matching_instances() {
        let a = TrialSet::new("a", "p1", vec![Feasible(1)]);
        let b = TrialSet::new("b", "p2", vec![Feasible(1)]);
        assert!(matches!(
            compute_e(&a, &b, Alpha::ONE),
            Err(StatsError::InstanceMismatch { .. })
        ));
        let empty = TrialSet::new("b", "p1", vec![]);
        assert!(matches!(
            compute_e(&a, &empty, Alpha::ONE),
            Err(StatsError::EmptyTrialSet { .. })
        ));
    }

    #[test]
    fn extreme_e_only_when_every_pair_won() {
        let a = set("a", &[Some(1), Some(2)]);
        let b = set("b", &[Some(3), None]);
        assert_eq!(compute_e(&a, &b, Alpha::ONE).unwrap(), 1.0);
    }

    #[test]
    fn identical_sets_rank_at_the_shared_mid() {
        let sets: Vec<TrialSet> = (0..4)
            .map(|i| TrialSet::new(format!("a{i}"), "p", vec![Feasible(1), Infeasible]))
            .collect();
        let ranks = rank_instance(&sets, Alpha::ONE).unwrap();
        assert_eq!(ranks, vec![2.5; 4]);
    }

    #[test]
    fn midranks_match_hand_examples() {
        assert_eq!(midranks_ascending(&[10, 20, 30]), vec![1.0, 2.0, 3.0]);
        assert_eq!(midranks_ascending(&[30, 20, 10]), vec![3.0, 2.0, 1.0]);
        assert_eq!(midranks_ascending(&[5, 5, 1]), vec![2.5, 2.5, 1.0]);
        assert_eq!(midranks_ascending(&[7, 7, 7, 7]), vec![2.5; 4]);
    }

    #[test]
    fn rank_instance_needs_two_algorithms() {
        let only = [TrialSet::new("a", "p", vec![Feasible(1)])];
        assert!(matches!(
            rank_instance(&only, Alpha::ONE),
            Err(StatsError::TooFew { what: "algorithms", .. })
        ));
    }

    #[test]
    fn cyclic_triples_are_detected_and_ranked() {
        // Intransitive-dice cost multisets: b beats a, c beats b, a beats c.
        let a = set("a", &[Some(2), Some(4), Some(9)]);
        let b = set("b", &[Some(1), Some(6), Some(8)]);
        let c = set("c", &[Some(3), Some(5), Some(7)]);
        let matrix = EMatrix::from_trial_sets(&[a.clone(), b.clone(), c.clone()], Alpha::ONE).unwrap();
        let e_ba = matrix.value(1, 0);
        let e_cb = matrix.value(2, 1);
        let e_ac = matrix.value(0, 2);
        assert!(e_ba > 0.0 && e_cb > 0.0 && e_ac > 0.0, "{e_ba} {e_cb} {e_ac}");
        assert_eq!(matrix.intransitive_triples(), vec![[0, 1, 2]]);
        // Copeland degrades gracefully: a three-way tie at the shared mid-rank.
        let ranks = rank_instance(&[a, b, c], Alpha::ONE).unwrap();
        let sum: f64 = ranks.iter().sum();
        assert_eq!(sum, 6.0);
        assert_eq!(ranks, vec![2.0; 3]);
    }
}
