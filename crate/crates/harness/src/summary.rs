//! Per-(algorithm, instance) outcome classification against a baseline cost:
//! how many of the K trials ended infeasible, hit the baseline exactly,
//! landed within three cost units, or worse. Emitted as CSV plot data.

use crate::results::ResultRow;
use rostering_core::exact::{exact_solve, ExactOutcome, SolveLimits};
use rostering_core::problem::{ExtendedCost, ProblemInstance};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SummaryError {
    #[error("no rows to summarize")]
    Empty,
    #[error("baseline 'exact' needs the instance files; missing instance {0:?}")]
    MissingInstance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMode {
    /// Branch-and-bound optimum per instance; falls back to best-known with
    /// a warning flag when the solver budget is exceeded.
    Exact,
    /// Cheapest feasible cost observed across all algorithms and trials.
    BestKnown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCell {
    pub algorithm: String,
    pub instance: String,
    /// Absent when no baseline exists (no feasible trial anywhere and no
    /// exact optimum).
    pub baseline: Option<u32>,
    /// `"exact"`, `"best-known"`, or `"best-known (exact budget exceeded)"`.
    pub baseline_source: String,
    pub infeasible: u32,
    pub optimal: u32,
    pub within_three: u32,
    pub worse: u32,
}

impl SummaryCell {
    pub fn total(&self) -> u32 {
        self.infeasible + self.optimal + self.within_three + self.worse
    }
}

pub const SUMMARY_HEADER: &str =
    "algorithm,instance,baseline,baseline_source,infeasible,optimal,within_three,worse";

/// Classifies every (algorithm, instance) cell of the results.
///
/// With [`BaselineMode::Exact`], `instances` must supply each instance by
/// name and `limits` bounds each solve.
pub fn emit_summary(
    rows: &[ResultRow],
    mode: BaselineMode,
    instances: &BTreeMap<String, ProblemInstance>,
    limits: SolveLimits,
) -> Result<Vec<SummaryCell>, SummaryError> {
    if rows.is_empty() {
        return Err(SummaryError::Empty);
    }

    let mut instance_names: Vec<&str> = rows.iter().map(|r| r.instance.as_str()).collect();
    instance_names.sort_unstable();
    instance_names.dedup();

    // Baseline per instance.
    let mut baselines: BTreeMap<&str, (Option<u32>, String)> = BTreeMap::new();
    for name in &instance_names {
        let best_known = rows
            .iter()
            .filter(|r| r.instance == *name)
            .filter_map(|r| r.cost.cost())
            .min();
        let entry = match mode {
            BaselineMode::BestKnown => (best_known, "best-known".to_string()),
            BaselineMode::Exact => {
                let instance = instances
                    .get(*name)
                    .ok_or_else(|| SummaryError::MissingInstance((*name).to_string()))?;
                match exact_solve(instance, limits) {
                    ExactOutcome::Optimal { cost, .. } => (Some(cost), "exact".to_string()),
                    ExactOutcome::ProvenInfeasible => (None, "exact".to_string()),
                    ExactOutcome::BudgetExceeded { .. } => {
                        (best_known, "best-known (exact budget exceeded)".to_string())
                    }
                }
            }
        };
        baselines.insert(name, entry);
    }

    let mut cells: BTreeMap<(String, String), SummaryCell> = BTreeMap::new();
    for row in rows {
        let (baseline, source) = &baselines[row.instance.as_str()];
        let cell = cells
            .entry((row.algorithm.clone(), row.instance.clone()))
            .or_insert_with(|| SummaryCell {
                algorithm: row.algorithm.clone(),
                instance: row.instance.clone(),
                baseline: *baseline,
                baseline_source: source.clone(),
                infeasible: 0,
                optimal: 0,
                within_three: 0,
                worse: 0,
            });
        match (row.cost, baseline) {
            (ExtendedCost::Infeasible, _) => cell.infeasible += 1,
            (ExtendedCost::Feasible(_), None) => cell.worse += 1,
            (ExtendedCost::Feasible(c), Some(b)) => {
                if c == *b {
                    cell.optimal += 1;
                } else if c <= b + 3 {
                    cell.within_three += 1;
                } else {
                    cell.worse += 1;
                }
            }
        }
    }
    Ok(cells.into_values().collect())
}

/// The CSV plot-data rendering of a summary.
pub fn summary_csv(cells: &[SummaryCell]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for cell in cells {
        let baseline = cell.baseline.map_or(String::from("none"), |b| b.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            cell.algorithm,
            cell.instance,
            baseline,
            cell.baseline_source,
            cell.infeasible,
            cell.optimal,
            cell.within_three,
            cell.worse
        )
        .expect("writing to string");
    }
    out
}
