//! Whole-experiment comparison: per-instance E matrices and ranks, the
//! Friedman layer across instances, and pairwise Wilcoxon/sign tests on the
//! per-instance E series of every algorithm pair.

use super::nonparametric::{friedman, sign_test, wilcoxon_signed_rank, FriedmanOutcome, TestOutcome};
use super::{midranks_ascending, Alpha, EMatrix, StatsError, TrialSet};
use serde::Serialize;
use std::collections::BTreeMap;

/// Pairwise significance tests for one algorithm pair: the per-instance E
/// values of `first` vs `second` (ordered like `instances` in the report),
/// tested for a symmetric-around-zero distribution.
#[derive(Debug, Clone, Serialize)]
pub struct PairwiseTests {
    pub first: String,
    pub second: String,
    pub e_values: Vec<f64>,
    pub wilcoxon: TestOutcome,
    pub sign: TestOutcome,
}

/// An algorithm triple whose pairwise relation is cyclic on some instance.
#[derive(Debug, Clone, Serialize)]
pub struct IntransitiveTriple {
    pub instance: String,
    pub algorithms: [String; 3],
}

/// Everything the comparison layer produces for one alpha value.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub algorithms: Vec<String>,
    pub instances: Vec<String>,
    pub e_matrices: Vec<EMatrix>,
    /// Per instance (outer) per algorithm (inner) mid-ranks, 1 = worst.
    pub instance_ranks: Vec<Vec<f64>>,
    pub average_ranks: Vec<f64>,
    /// Present when there are at least two instances and two algorithms.
    pub friedman: Option<FriedmanOutcome>,
    pub pairwise: Vec<PairwiseTests>,
    pub intransitive_triples: Vec<IntransitiveTriple>,
}

impl ComparisonReport {
    /// Algorithms ordered best first by average rank (higher rank = better).
    pub fn ordering_best_first(&self) -> Vec<String> {
        let mut order: Vec<usize> = (0..self.algorithms.len()).collect();
        order.sort_by(|&a, &b| {
            self.average_ranks[b]
                .partial_cmp(&self.average_ranks[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| self.algorithms[a].cmp(&self.algorithms[b]))
        });
        order.into_iter().map(|i| self.algorithms[i].clone()).collect()
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairwiseTests> {
        self.pairwise
            .iter()
            .find(|p| (p.first == a && p.second == b) || (p.first == b && p.second == a))
    }
}

/// Runs the full comparison for one alpha: groups trial sets by instance,
/// builds E matrices and Copeland mid-ranks, applies Friedman across
/// instances and Wilcoxon/sign tests to every algorithm pair.
///
/// Requires exactly one trial set per (algorithm, instance) cell; missing
/// cells are reported by name.
pub fn overall_comparison(sets: &[TrialSet], alpha: Alpha) -> Result<ComparisonReport, StatsError> {
    if sets.is_empty() {
        return Err(StatsError::EmptyInput);
    }

    let mut algorithms: Vec<String> = sets.iter().map(|s| s.algorithm.clone()).collect();
    algorithms.sort();
    algorithms.dedup();
    let mut instances: Vec<String> = sets.iter().map(|s| s.instance.clone()).collect();
    instances.sort();
    instances.dedup();

    let mut grid: BTreeMap<(&str, &str), &TrialSet> = BTreeMap::new();
    for set in sets {
        if grid
            .insert((set.instance.as_str(), set.algorithm.as_str()), set)
            .is_some()
        {
            return Err(StatsError::DuplicateTrialSet {
                algorithm: set.algorithm.clone(),
                instance: set.instance.clone(),
            });
        }
    }
    let missing: Vec<(String, String)> = algorithms
        .iter()
        .flat_map(|a| {
            instances
                .iter()
                .filter(|i| !grid.contains_key(&(i.as_str(), a.as_str())))
                .map(|i| (a.clone(), i.clone()))
        })
        .collect();
    if !missing.is_empty() {
        return Err(StatsError::IncompleteGrid(missing));
    }

    let k = algorithms.len();
    let mut e_matrices = Vec::with_capacity(instances.len());
    let mut instance_ranks = Vec::with_capacity(instances.len());
    let mut intransitive = Vec::new();
    for instance in &instances {
        let row_sets: Vec<TrialSet> = algorithms
            .iter()
            .map(|a| (*grid[&(instance.as_str(), a.as_str())]).clone())
            .collect();
        let matrix = EMatrix::from_trial_sets(&row_sets, alpha)?;
        for triple in matrix.intransitive_triples() {
            intransitive.push(IntransitiveTriple {
                instance: instance.clone(),
                algorithms: triple.map(|i| algorithms[i].clone()),
            });
        }
        let ranks = if k >= 2 {
            midranks_ascending(&matrix.copeland_scores())
        } else {
            vec![1.0]
        };
        instance_ranks.push(ranks);
        e_matrices.push(matrix);
    }

    let average_ranks: Vec<f64> = (0..k)
        .map(|j| instance_ranks.iter().map(|r| r[j]).sum::<f64>() / instances.len() as f64)
        .collect();

    let friedman_outcome = if instances.len() >= 2 && k >= 2 {
        Some(friedman(&instance_ranks)?)
    } else {
        None
    };

    let mut pairwise = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let e_values: Vec<f64> = e_matrices.iter().map(|m| m.value(i, j)).collect();
            pairwise.push(PairwiseTests {
                first: algorithms[i].clone(),
                second: algorithms[j].clone(),
                wilcoxon: wilcoxon_signed_rank(&e_values)?,
                sign: sign_test(&e_values)?,
                e_values,
            });
        }
    }

    Ok(ComparisonReport {
        alpha: alpha.value(),
        algorithms,
        instances,
        e_matrices,
        instance_ranks,
        average_ranks,
        friedman: friedman_outcome,
        pairwise,
        intransitive_triples: intransitive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ExtendedCost::{Feasible, Infeasible};

    fn set(alg: &str, inst: &str, costs: Vec<u32>, infeasible: usize) -> TrialSet {
        let mut c: Vec<_> = costs.into_iter().map(Feasible).collect();
        c.extend(std::iter::repeat(Infeasible).take(infeasible));
        TrialSet::new(alg, inst, c)
    }

    #[test]
    fn identical_algorithms_everywhere_are_indistinguishable() {
        let mut sets = Vec::new();
        for inst in ["p1", "p2", "p3"] {
            sets.push(set("a", inst, vec![1, 2, 3], 1));
            sets.push(set("b", inst, vec![1, 2, 3], 1));
        }
        let report = overall_comparison(&sets, Alpha::ONE).unwrap();
        for m in &report.e_matrices {
            assert_eq!(m.value(0, 1), 0.0);
        }
        assert_eq!(report.average_ranks, vec![1.5, 1.5]);
        let pair = report.pair("a", "b").unwrap();
        assert!(pair.wilcoxon.degenerate);
        assert!(pair.sign.degenerate);
        assert!(!pair.wilcoxon.significant_at(0.05));
    }

    #[test]
    fn missing_cells_are_reported_by_name() {
        let sets = vec![
            set("a", "p1", vec![1], 0),
            set("b", "p1", vec![2], 0),
            set("a", "p2", vec![1], 0),
        ];
        match overall_comparison(&sets, Alpha::ONE) {
            Err(StatsError::IncompleteGrid(missing)) => {
                assert_eq!(missing, vec![("b".to_string(), "p2".to_string())]);
            }
            other => panic!("expected incomplete grid, got {other:?}"),
        }
    }

    #[test]
    fn duplicates_are_rejected() {
        let sets = vec![set("a", "p1", vec![1], 0), set("a", "p1", vec![2], 0)];
        assert!(matches!(
            overall_comparison(&sets, Alpha::ONE),
            Err(StatsError::DuplicateTrialSet { .. })
        ));
    }

    #[test]
    fn single_algorithm_yields_empty_pairwise_section() {
        let sets = vec![set("solo", "p1", vec![1, 2], 0), set("solo", "p2", vec![3], 0)];
        let report = overall_comparison(&sets, Alpha::ONE).unwrap();
        assert!(report.pairwise.is_empty());
        assert!(report.friedman.is_none());
        assert_eq!(report.instance_ranks, vec![vec![1.0], vec![1.0]]);
    }

    #[test]
    fn dominant_algorithm_orders_first() {
        let mut sets = Vec::new();
        for inst in ["p1", "p2"] {
            sets.push(set("good", inst, vec![1, 1, 2], 0));
            sets.push(set("bad", inst, vec![9, 9], 2));
        }
        let report = overall_comparison(&sets, Alpha::ONE).unwrap();
        assert_eq!(report.ordering_best_first(), vec!["good".to_string(), "bad".to_string()]);
        let friedman = report.friedman.unwrap();
        assert_eq!(friedman.degrees_of_freedom, 1);
        // good ranked 2 (best) on both instances.
        assert_eq!(report.average_ranks, vec![1.0, 2.0]);
    }
}
