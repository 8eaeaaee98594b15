//! Command-line harness: generate instances, run single solves or full
//! experiment grids, compare results and summarize outcomes.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rostering_core::exact::{exact_solve, ExactOutcome, SolveLimits};
use rostering_core::ga::direct::run_direct_ga;
use rostering_core::ga::indirect::run_indirect_ga;
use rostering_core::instances::{generate_instance, read_instance, write_instance, GeneratorConfig};
use rostering_core::rng::derive_seed;
use rostering_harness::compare::{compare_results, write_reports};
use rostering_harness::config::ExperimentConfig;
use rostering_harness::presets::{lookup, AlgorithmKind};
use rostering_harness::results::{read_results, write_results};
use rostering_harness::runner::{load_plan, run_experiment};
use rostering_harness::summary::{emit_summary, summary_csv, BaselineMode};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Parser)]
#[command(name = "rostering", about = "Nurse rostering solvers and comparison harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutDir {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instance files from a generator config.
    Generate {
        /// Generator config JSON; omit to use the built-in desk preset.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of instances (each gets a derived sub-seed).
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        out: OutDir,
    },
    /// Run one algorithm preset on one instance; prints the cost or INF.
    Solve {
        /// Preset name (V1-V8, U1-U8, W1-W8).
        #[arg(long)]
        preset: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve one instance exactly by branch-and-bound.
    Exact {
        #[arg(long)]
        instance: PathBuf,
        /// Node budget.
        #[arg(long, default_value_t = 20_000_000)]
        nodes: u64,
        /// Optional wall-clock budget in milliseconds.
        #[arg(long)]
        time_ms: Option<u64>,
    },
    /// Run the full (algorithm x instance x trial) grid of an experiment.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Compare a results file: one report per alpha plus a stability summary.
    Compare {
        #[arg(long)]
        results: PathBuf,
        /// Comma-separated alpha values in [0, 1].
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        alpha: Vec<f64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Classify trials against a baseline; emits bar-chart CSV data.
    Summary {
        #[arg(long)]
        results: PathBuf,
        /// `exact` (needs --instances) or `best-known`.
        #[arg(long, default_value = "best-known")]
        baseline: String,
        /// Directory holding `<instance>.json` files for the exact baseline.
        #[arg(long)]
        instances: Option<PathBuf>,
        /// Node budget per exact solve.
        #[arg(long, default_value_t = 20_000_000)]
        nodes: u64,
        #[command(flatten)]
        out: OutDir,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate { config, seed, count, out } => generate(config, seed, count, &out.out),
        Command::Solve { preset, instance, seed } => solve(&preset, &instance, seed),
        Command::Exact { instance, nodes, time_ms } => exact(&instance, nodes, time_ms),
        Command::Experiment { config, jobs, out } => experiment(&config, jobs, &out.out),
        Command::Compare { results, alpha, out } => compare(&results, &alpha, &out.out),
        Command::Summary { results, baseline, instances, nodes, out } => {
            summary(&results, &baseline, instances.as_deref(), nodes, &out.out)
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn generate(config: Option<PathBuf>, seed: Option<u64>, count: usize, out: &Path) -> Result<()> {
    let mut cfg: GeneratorConfig = match config {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .with_context(|| format!("reading generator config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing generator config {}", path.display()))?
        }
        None => GeneratorConfig::desk(0),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if count == 0 {
        bail!("--count must be at least 1");
    }
    ensure_dir(out)?;
    for index in 0..count {
        let mut instance_cfg = cfg.clone();
        instance_cfg.seed = derive_seed(cfg.seed, &["instance", &index.to_string()]);
        let instance = generate_instance(&instance_cfg)?;
        let path = out.join(format!("gen-{}-{index:03}.json", cfg.seed));
        write_instance(&instance, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn solve(preset_name: &str, instance_path: &Path, seed: u64) -> Result<()> {
    let preset = lookup(preset_name)?;
    let instance = read_instance(instance_path)?;
    let ga = preset.ga.clone().with_seed(seed);
    let result = match preset.kind {
        AlgorithmKind::Direct => run_direct_ga(&instance, &ga)?,
        AlgorithmKind::Indirect => run_indirect_ga(&instance, &ga, &preset.decoder_config())?,
    };
    eprintln!(
        "preset={} seed={} generations={} time_ms={}",
        preset.name,
        seed,
        result.generations,
        result.wall_time.as_millis()
    );
    println!("{}", result.best_cost);
    Ok(())
}

fn exact(instance_path: &Path, nodes: u64, time_ms: Option<u64>) -> Result<()> {
    let instance = read_instance(instance_path)?;
    let limits = SolveLimits {
        max_nodes: nodes,
        time_budget: time_ms.map(Duration::from_millis),
    };
    match exact_solve(&instance, limits) {
        ExactOutcome::Optimal { cost, roster } => {
            eprintln!("assignment={:?}", roster.assignment);
            println!("optimal {cost}");
        }
        ExactOutcome::ProvenInfeasible => println!("infeasible"),
        ExactOutcome::BudgetExceeded { best, nodes } => match best {
            Some((_, cost)) => println!("budget-exceeded after {nodes} nodes, best {cost}"),
            None => println!("budget-exceeded after {nodes} nodes, no feasible roster found"),
        },
    }
    Ok(())
}

fn experiment(config_path: &Path, jobs: Option<usize>, out: &Path) -> Result<()> {
    let cfg = ExperimentConfig::from_file(config_path)?;
    let out_dir = cfg.output_dir.clone().unwrap_or_else(|| out.to_path_buf());
    ensure_dir(&out_dir)?;
    let plan = load_plan(&cfg)?;
    eprintln!(
        "running {} algorithms x {} instances x {} trials",
        plan.algorithms.len(),
        plan.instances.len(),
        plan.trials
    );
    let rows = run_experiment(&plan, jobs)?;
    let results_path = out_dir.join("results.csv");
    write_results(&results_path, &rows)?;
    println!("{}", results_path.display());

    let output = compare_results(&rows, &plan.alphas)?;
    for path in write_reports(&out_dir, &output)? {
        println!("{path}");
    }
    if !output.stability.stable() {
        eprintln!("note: conclusions vary across alpha values; see alpha_stability.json");
    }
    Ok(())
}

fn compare(results_path: &Path, alphas: &[f64], out: &Path) -> Result<()> {
    let rows = read_results(results_path)?;
    ensure_dir(out)?;
    let output = compare_results(&rows, alphas)?;
    for path in write_reports(out, &output)? {
        println!("{path}");
    }
    let stable = if output.stability.stable() { "stable" } else { "NOT stable" };
    eprintln!("broad conclusions across alphas {:?}: {stable}", output.stability.alphas);
    Ok(())
}

fn summary(
    results_path: &Path,
    baseline: &str,
    instances_dir: Option<&Path>,
    nodes: u64,
    out: &Path,
) -> Result<()> {
    let rows = read_results(results_path)?;
    let mode = match baseline {
        "exact" => BaselineMode::Exact,
        "best-known" => BaselineMode::BestKnown,
        other => bail!("--baseline must be 'exact' or 'best-known', got {other:?}"),
    };
    let mut instances = BTreeMap::new();
    if mode == BaselineMode::Exact {
        let dir = instances_dir
            .context("--baseline exact needs --instances <dir> with <name>.json files")?;
        let mut names: Vec<String> = rows.iter().map(|r| r.instance.clone()).collect();
        names.sort();
        names.dedup();
        for name in names {
            let path = dir.join(format!("{name}.json"));
            instances.insert(name, read_instance(&path)?);
        }
    }
    let limits = SolveLimits {
        max_nodes: nodes,
        time_budget: None,
    };
    let cells = emit_summary(&rows, mode, &instances, limits)?;
    ensure_dir(out)?;
    let path = out.join("summary.csv");
    fs::write(&path, summary_csv(&cells)).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}
