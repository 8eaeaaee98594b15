//! Experiment harness around the rostering solvers: named algorithm
//! presets, grid execution with per-trial seeds, results persistence,
//! statistical comparison reports and outcome summaries.

pub mod compare;
pub mod config;
pub mod presets;
pub mod results;
pub mod runner;
pub mod summary;

/// Reference costs for the weeks 1-3 benchmark series, in results-file
/// format (seed/generations/time columns are zeroed: the trials predate this
/// implementation).
pub const REFERENCE_COSTS_CSV: &str = include_str!("../data/reference_costs_weeks1to3.csv");
