//! Experiment execution: a grid of seeded trials over (algorithm, instance)
//! cells, run on a bounded worker pool.
//!
//! Each trial's seed is `derive_seed(base_seed, [algorithm, instance,
//! trial_index])`, so any row of the results file can be reproduced in
//! isolation. Rows are emitted sorted by (algorithm, instance, trial), which
//! makes re-runs byte-identical apart from the wall-time column.

use crate::config::{ConfigError, ExperimentConfig, InstanceSource};
use crate::presets::{AlgorithmKind, AlgorithmPreset};
use crate::results::ResultRow;
use rayon::prelude::*;
use rostering_core::ga::direct::run_direct_ga;
use rostering_core::ga::indirect::run_indirect_ga;
use rostering_core::instances::{generate_instance, read_instance, InstanceError};
use rostering_core::problem::ProblemInstance;
use rostering_core::rng::derive_seed;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("instance name {0:?} is empty or contains a comma/newline")]
    BadInstanceName(String),
    #[error("solver failed for preset {preset:?}: {source}")]
    Solver {
        preset: String,
        source: rostering_core::ga::GaError,
    },
}

/// A fully resolved experiment: algorithms validated, instances loaded.
pub struct ExperimentPlan {
    pub algorithms: Vec<AlgorithmPreset>,
    pub instances: Vec<(String, ProblemInstance)>,
    pub trials: u32,
    pub base_seed: u64,
    pub alphas: Vec<f64>,
}

/// Validates the config and loads or generates every instance up front, so
/// failures happen before any trial runs.
pub fn load_plan(cfg: &ExperimentConfig) -> Result<ExperimentPlan, RunError> {
    let algorithms = cfg.resolve_algorithms()?;
    let instances = match &cfg.instances {
        InstanceSource::Paths(paths) => {
            if paths.is_empty() {
                return Err(ConfigError::Invalid("instance path list is empty".into()).into());
            }
            let mut out = Vec::with_capacity(paths.len());
            for path in paths {
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                out.push((name, read_instance(path)?));
            }
            out
        }
        InstanceSource::Generate { count, config } => {
            if *count == 0 {
                return Err(ConfigError::Invalid("instance count must be at least 1".into()).into());
            }
            let mut out = Vec::with_capacity(*count);
            for index in 0..*count {
                let mut instance_cfg = config.clone();
                instance_cfg.seed = derive_seed(config.seed, &["instance", &index.to_string()]);
                let name = format!("gen-{}-{index:03}", config.seed);
                out.push((name, generate_instance(&instance_cfg)?));
            }
            out
        }
    };
    for (name, _) in &instances {
        if name.is_empty() || name.contains(',') || name.contains('\n') {
            return Err(RunError::BadInstanceName(name.clone()));
        }
    }
    {
        let mut names: Vec<&str> = instances.iter().map(|(n, _)| n.as_str()).collect();
        names.sort_unstable();
        if let Some(dup) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(
                ConfigError::Invalid(format!("instance name {:?} appears twice", dup[0])).into(),
            );
        }
    }
    Ok(ExperimentPlan {
        algorithms,
        instances,
        trials: cfg.trials,
        base_seed: cfg.base_seed,
        alphas: cfg.alphas.clone(),
    })
}

/// The seed for one trial; a pure function of the experiment coordinates.
pub fn trial_seed(base_seed: u64, algorithm: &str, instance: &str, trial: u32) -> u64 {
    derive_seed(base_seed, &[algorithm, instance, &trial.to_string()])
}

fn run_one(
    preset: &AlgorithmPreset,
    instance_name: &str,
    instance: &ProblemInstance,
    base_seed: u64,
    trial: u32,
) -> Result<ResultRow, RunError> {
    let seed = trial_seed(base_seed, &preset.name, instance_name, trial);
    let ga = preset.ga.clone().with_seed(seed);
    let result = match preset.kind {
        AlgorithmKind::Direct => run_direct_ga(instance, &ga),
        AlgorithmKind::Indirect => run_indirect_ga(instance, &ga, &preset.decoder_config()),
    }
    .map_err(|source| RunError::Solver {
        preset: preset.name.clone(),
        source,
    })?;
    Ok(ResultRow {
        algorithm: preset.name.clone(),
        instance: instance_name.to_string(),
        trial,
        seed,
        cost: result.best_cost,
        generations: result.generations,
        time_ms: result.wall_time.as_millis() as u64,
    })
}

/// Runs every (algorithm, instance, trial) cell on up to `jobs` worker
/// threads (`None` uses all cores) and returns rows sorted by cell.
pub fn run_experiment(plan: &ExperimentPlan, jobs: Option<usize>) -> Result<Vec<ResultRow>, RunError> {
    let mut work: Vec<(usize, usize, u32)> = Vec::new();
    for a in 0..plan.algorithms.len() {
        for i in 0..plan.instances.len() {
            for t in 0..plan.trials {
                work.push((a, i, t));
            }
        }
    }

    let execute = |&(a, i, t): &(usize, usize, u32)| -> Result<ResultRow, RunError> {
        let (name, instance) = &plan.instances[i];
        run_one(&plan.algorithms[a], name, instance, plan.base_seed, t)
    };

    let mut rows: Vec<ResultRow> = match jobs {
        Some(1) => work.iter().map(|w| execute(w)).collect::<Result<_, _>>()?,
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("worker pool");
            pool.install(|| work.par_iter().map(execute).collect::<Result<_, _>>())?
        }
        None => work.par_iter().map(execute).collect::<Result<_, _>>()?,
    };

    rows.sort_by(|x, y| {
        (&x.algorithm, &x.instance, x.trial).cmp(&(&y.algorithm, &y.instance, y.trial))
    });
    Ok(rows)
}
