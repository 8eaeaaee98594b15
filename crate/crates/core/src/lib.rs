//! Weekly nurse rostering: problem model, exact and evolutionary solvers,
//! and an infeasibility-aware statistical comparison of solver variants.

pub mod exact;
pub mod ga;
pub mod instances;
pub mod problem;
pub mod rng;
pub mod stats;
