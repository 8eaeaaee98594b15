//! Synthetic instance generation and instance file I/O.
//!
//! Generated instances are feasible by construction: a random roster is drawn
//! first and demand is set to `floor(tightness * coverage)` of that roster,
//! so the seeding roster itself meets demand whenever `tightness <= 1`.
//!
//! All randomness flows from [`GeneratorConfig::seed`] through the named
//! sub-streams `"contracts"`, `"costs"` and `"seed-roster"` (see
//! [`crate::rng::derive_seed`]), which makes generation bit-reproducible.

use crate::problem::{
    coverage, feasible_patterns, Contract, Nurse, ProblemError, ProblemInstance, Roster,
    ShiftPattern, DAY_SLOTS, SLOT_COUNT,
};
use crate::rng::{derive_seed, rng_from_seed};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: unsupported instance file version {got} (expected {INSTANCE_FILE_VERSION})")]
    Version { path: String, got: u32 },
    #[error("{path}: pattern {index}: {message}")]
    Pattern {
        path: String,
        index: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: String,
        source: ProblemError,
    },
}

/// Proportions of the three contract classes and the weekly shift counts
/// drawn within each class.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ContractMix {
    pub day_weight: f64,
    pub night_weight: f64,
    pub combined_weight: f64,
    #[serde(default)]
    pub day_shifts: Vec<u8>,
    #[serde(default)]
    pub night_shifts: Vec<u8>,
    #[serde(default)]
    pub combined_shifts: Vec<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub nurse_count: usize,
    pub grade_count: u8,
    pub contract_mix: ContractMix,
    /// Demand as a fraction of the seeding roster's coverage, in `(0, 1]`.
    pub tightness: f64,
    /// Preference costs are drawn uniformly from `0..=max_cost`.
    pub max_cost: u32,
    /// Cap on the number of mixed day/night patterns enumerated per combined
    /// shift count. Keeps catalogs at a workable size; at least one mixed
    /// pattern per combined count is always kept.
    #[serde(default)]
    pub combined_pattern_limit: Option<usize>,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Desk-scale preset: 10 nurses, 3 grades, 64 patterns.
    pub fn desk(seed: u64) -> Self {
        Self {
            nurse_count: 10,
            grade_count: 3,
            contract_mix: ContractMix {
                day_weight: 0.5,
                night_weight: 0.3,
                combined_weight: 0.2,
                day_shifts: vec![5],
                night_shifts: vec![4],
                combined_shifts: vec![5],
                // 21 day + 35 night + 8 mixed = 64 patterns
            },
            tightness: 0.9,
            max_cost: 50,
            combined_pattern_limit: Some(8),
            seed,
        }
    }

    /// Full-scale preset: 30 nurses, 3 grades, 411 patterns
    /// (91 day + 91 night + 229 mixed five-shift patterns).
    pub fn full_scale(seed: u64) -> Self {
        Self {
            nurse_count: 30,
            grade_count: 3,
            contract_mix: ContractMix {
                day_weight: 0.6,
                night_weight: 0.3,
                combined_weight: 0.1,
                day_shifts: vec![3, 4, 5],
                night_shifts: vec![3, 4, 5],
                combined_shifts: vec![5],
            },
            tightness: 0.9,
            max_cost: 100,
            combined_pattern_limit: Some(229),
            seed,
        }
    }

    /// Tiny preset for oracle cross-checks: 6 nurses, 2 grades, 14 patterns.
    pub fn tiny(seed: u64) -> Self {
        Self {
            nurse_count: 6,
            grade_count: 2,
            contract_mix: ContractMix {
                day_weight: 0.5,
                night_weight: 0.5,
                combined_weight: 0.0,
                day_shifts: vec![1],
                night_shifts: vec![1],
                combined_shifts: vec![],
            },
            tightness: 0.8,
            max_cost: 20,
            combined_pattern_limit: None,
            seed,
        }
    }

    fn validate(&self) -> Result<(), InstanceError> {
        let cfg_err = |msg: String| Err(InstanceError::Config(msg));
        if self.nurse_count == 0 {
            return cfg_err("nurse_count must be at least 1".into());
        }
        if self.grade_count == 0 {
            return cfg_err("grade_count must be at least 1".into());
        }
        if !(self.tightness > 0.0 && self.tightness <= 1.0) {
            return cfg_err(format!("tightness must be in (0, 1], got {}", self.tightness));
        }
        let mix = &self.contract_mix;
        for (label, weight) in [
            ("day_weight", mix.day_weight),
            ("night_weight", mix.night_weight),
            ("combined_weight", mix.combined_weight),
        ] {
            if !(weight >= 0.0 && weight.is_finite()) {
                return cfg_err(format!("{label} must be finite and nonnegative, got {weight}"));
            }
        }
        if mix.day_weight + mix.night_weight + mix.combined_weight <= 0.0 {
            return cfg_err("contract mix weights must not all be zero".into());
        }
        for (label, weight, shifts, max) in [
            ("day", mix.day_weight, &mix.day_shifts, DAY_SLOTS as u8),
            ("night", mix.night_weight, &mix.night_shifts, DAY_SLOTS as u8),
            ("combined", mix.combined_weight, &mix.combined_shifts, SLOT_COUNT as u8),
        ] {
            if weight > 0.0 && shifts.is_empty() {
                return cfg_err(format!(
                    "{label} contracts have positive weight but no shift counts"
                ));
            }
            if let Some(&bad) = shifts.iter().find(|&&c| c > max) {
                return cfg_err(format!("{label} shift count {bad} exceeds {max}"));
            }
        }
        if self.combined_pattern_limit == Some(0) {
            return cfg_err("combined_pattern_limit must be at least 1".into());
        }
        Ok(())
    }
}

/// Emits every distinct pattern with the requested number of worked slots:
/// day-only patterns for each count in `day_counts`, then night-only, then
/// whole-week patterns for each count in `combined_counts`. Counts are taken
/// in ascending order; within one count, positions are enumerated in
/// lexicographic order, so `day_counts = {5}` starts with `11111000000000`.
pub fn enumerate_patterns(
    day_counts: &[u8],
    night_counts: &[u8],
    combined_counts: &[u8],
) -> Vec<ShiftPattern> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |p: ShiftPattern, out: &mut Vec<ShiftPattern>| {
        if seen.insert(p) {
            out.push(p);
        }
    };

    let sorted_dedup = |counts: &[u8]| {
        let mut v = counts.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };

    for count in sorted_dedup(day_counts) {
        for combo in combinations(DAY_SLOTS, count as usize) {
            let mut slots = [false; SLOT_COUNT];
            for pos in combo {
                slots[pos] = true;
            }
            push(ShiftPattern::new(slots), &mut out);
        }
    }
    for count in sorted_dedup(night_counts) {
        for combo in combinations(DAY_SLOTS, count as usize) {
            let mut slots = [false; SLOT_COUNT];
            for pos in combo {
                slots[DAY_SLOTS + pos] = true;
            }
            push(ShiftPattern::new(slots), &mut out);
        }
    }
    for count in sorted_dedup(combined_counts) {
        for combo in combinations(SLOT_COUNT, count as usize) {
            let mut slots = [false; SLOT_COUNT];
            for pos in combo {
                slots[pos] = true;
            }
            push(ShiftPattern::new(slots), &mut out);
        }
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        out.push(combo.clone());
        if k == 0 {
            break;
        }
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] != i + n - k {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
    out
}

/// The deterministic pattern catalog for a generator config: day and night
/// patterns for the configured counts, plus mixed (day and night) patterns
/// for each combined count, capped at `combined_pattern_limit` per count.
fn build_catalog(cfg: &GeneratorConfig) -> Vec<ShiftPattern> {
    let mix = &cfg.contract_mix;
    let day = if mix.day_weight > 0.0 { mix.day_shifts.clone() } else { Vec::new() };
    let night = if mix.night_weight > 0.0 { mix.night_shifts.clone() } else { Vec::new() };
    let mut catalog = enumerate_patterns(&day, &night, &[]);

    if mix.combined_weight > 0.0 {
        let limit = cfg.combined_pattern_limit.unwrap_or(usize::MAX);
        let mut seen: HashSet<ShiftPattern> = catalog.iter().copied().collect();
        let mut counts = mix.combined_shifts.clone();
        counts.sort_unstable();
        counts.dedup();
        for count in counts {
            let mut taken = 0usize;
            for pattern in enumerate_patterns(&[], &[], &[count]) {
                if taken >= limit {
                    break;
                }
                // Only genuinely mixed patterns count against the cap;
                // pure-half patterns are either present already or belong to
                // the day/night classes.
                if pattern.day_count() == 0 || pattern.night_count() == 0 {
                    continue;
                }
                if seen.insert(pattern) {
                    catalog.push(pattern);
                    taken += 1;
                }
            }
        }
    }
    catalog
}

/// Generates a problem instance. Deterministic for a fixed config; the
/// result always admits at least one feasible roster.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<ProblemInstance, InstanceError> {
    cfg.validate()?;
    let mix = &cfg.contract_mix;

    let catalog = build_catalog(cfg);
    if catalog.is_empty() {
        return Err(InstanceError::Config(
            "contract mix produces an empty pattern catalog".into(),
        ));
    }

    // Contracts and grades.
    let mut contracts_rng = rng_from_seed(derive_seed(cfg.seed, &["contracts"]));
    let total_weight = mix.day_weight + mix.night_weight + mix.combined_weight;
    let mut nurses = Vec::with_capacity(cfg.nurse_count);
    for _ in 0..cfg.nurse_count {
        let draw: f64 = contracts_rng.gen_range(0.0..total_weight);
        let contract = if draw < mix.day_weight {
            let shifts = mix.day_shifts[contracts_rng.gen_range(0..mix.day_shifts.len())];
            Contract::Days { shifts }
        } else if draw < mix.day_weight + mix.night_weight {
            let shifts = mix.night_shifts[contracts_rng.gen_range(0..mix.night_shifts.len())];
            Contract::Nights { shifts }
        } else {
            let shifts = mix.combined_shifts[contracts_rng.gen_range(0..mix.combined_shifts.len())];
            Contract::Both { shifts }
        };
        let grade = contracts_rng.gen_range(1..=cfg.grade_count);
        nurses.push(Nurse { grade, contract });
    }

    // Preference costs, row-major.
    let mut costs_rng = rng_from_seed(derive_seed(cfg.seed, &["costs"]));
    let pref_cost: Vec<Vec<u32>> = (0..cfg.nurse_count)
        .map(|_| (0..catalog.len()).map(|_| costs_rng.gen_range(0..=cfg.max_cost)).collect())
        .collect();

    // Seeding roster over the feasible sets, then demand from its coverage.
    let feasible: Vec<Vec<usize>> =
        nurses.iter().map(|n| feasible_patterns(n, &catalog)).collect();
    if let Some(nurse) = feasible.iter().position(Vec::is_empty) {
        return Err(InstanceError::Config(format!(
            "nurse {nurse} ({:?}) has no feasible pattern in the generated catalog",
            nurses[nurse].contract
        )));
    }
    let mut roster_rng = rng_from_seed(derive_seed(cfg.seed, &["seed-roster"]));
    let assignment: Vec<usize> = feasible
        .iter()
        .map(|set| set[roster_rng.gen_range(0..set.len())])
        .collect();

    // Demand needs the instance's coverage computation; build a zero-demand
    // instance first, then re-validate with the real demand.
    let zero_demand = vec![vec![0u32; cfg.grade_count as usize]; SLOT_COUNT];
    let skeleton = ProblemInstance::new(
        cfg.grade_count,
        nurses.clone(),
        catalog.clone(),
        pref_cost.clone(),
        zero_demand,
    )
    .map_err(|source| InstanceError::Invalid { path: "<generated>".into(), source })?;
    let cover = coverage(&skeleton, &Roster::new(assignment));
    let demand: Vec<Vec<u32>> = cover
        .iter()
        .map(|row| row.iter().map(|&c| (cfg.tightness * f64::from(c)).floor() as u32).collect())
        .collect();

    ProblemInstance::new(cfg.grade_count, nurses, catalog, pref_cost, demand)
        .map_err(|source| InstanceError::Invalid { path: "<generated>".into(), source })
}

pub const INSTANCE_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    version: u32,
    grades: u8,
    nurses: Vec<Nurse>,
    patterns: Vec<String>,
    pref_cost: Vec<Vec<u32>>,
    demand: Vec<Vec<u32>>,
}

/// Writes an instance as self-contained JSON (patterns as bit strings).
pub fn write_instance(inst: &ProblemInstance, path: &Path) -> Result<(), InstanceError> {
    let file = InstanceFile {
        version: INSTANCE_FILE_VERSION,
        grades: inst.grade_count(),
        nurses: inst.nurses().to_vec(),
        patterns: inst.patterns().iter().map(ShiftPattern::to_bit_string).collect(),
        pref_cost: inst.pref_cost_rows().to_vec(),
        demand: inst.demand_rows().to_vec(),
    };
    let json = serde_json::to_string_pretty(&file).expect("instance serialization cannot fail");
    fs::write(path, json).map_err(|source| InstanceError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Reads and fully validates an instance file written by [`write_instance`].
pub fn read_instance(path: &Path) -> Result<ProblemInstance, InstanceError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| InstanceError::Read {
        path: display.clone(),
        source,
    })?;
    parse_instance(&text, &display)
}

/// Parses instance JSON; `origin` is used in error messages.
pub fn parse_instance(text: &str, origin: &str) -> Result<ProblemInstance, InstanceError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|source| InstanceError::Parse {
        path: origin.to_string(),
        source,
    })?;
    if file.version != INSTANCE_FILE_VERSION {
        return Err(InstanceError::Version {
            path: origin.to_string(),
            got: file.version,
        });
    }
    let mut patterns = Vec::with_capacity(file.patterns.len());
    for (index, s) in file.patterns.iter().enumerate() {
        patterns.push(ShiftPattern::from_bit_str(s).map_err(|message| InstanceError::Pattern {
            path: origin.to_string(),
            index,
            message,
        })?);
    }
    ProblemInstance::new(file.grades, file.nurses, patterns, file.pref_cost, file.demand)
        .map_err(|source| InstanceError::Invalid { path: origin.to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_solve, ExactOutcome, SolveLimits};
    use crate::problem::is_feasible;

    #[test]
    fn enumerate_counts_match_binomials() {
        assert_eq!(enumerate_patterns(&[5], &[], &[]).len(), 21);
        // C(7,4) + C(7,5) + C(7,3) + C(7,4) = 35 + 21 + 35 + 35
        assert_eq!(enumerate_patterns(&[4, 5], &[3, 4], &[]).len(), 126);
        assert_eq!(enumerate_patterns(&[], &[], &[5]).len(), 2002);
    }

    #[test]
    fn first_five_day_pattern_is_the_leading_block() {
        let patterns = enumerate_patterns(&[5], &[], &[]);
        assert_eq!(patterns[0].to_bit_string(), "11111000000000");
    }

    #[test]
    fn enumeration_dedups_overlapping_classes() {
        // Combined count 5 regenerates the day-5 and night-5 patterns.
        let patterns = enumerate_patterns(&[5], &[5], &[5]);
        assert_eq!(patterns.len(), 2002);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GeneratorConfig::desk(99);
        let a = generate_instance(&cfg).unwrap();
        let b = generate_instance(&cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(&GeneratorConfig::desk(100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn desk_preset_has_expected_catalog() {
        let inst = generate_instance(&GeneratorConfig::desk(1)).unwrap();
        assert_eq!(inst.pattern_count(), 64);
        assert_eq!(inst.nurse_count(), 10);
    }

    #[test]
    fn full_scale_preset_has_411_patterns() {
        let inst = generate_instance(&GeneratorConfig::full_scale(1)).unwrap();
        assert_eq!(inst.pattern_count(), 411);
        assert_eq!(inst.nurse_count(), 30);
    }

    #[test]
    fn generated_tiny_instances_admit_a_feasible_optimum() {
        for seed in 0..5 {
            let mut cfg = GeneratorConfig::tiny(seed);
            cfg.nurse_count = 5;
            cfg.grade_count = 1;
            let inst = generate_instance(&cfg).unwrap();
            match exact_solve(&inst, SolveLimits::default()) {
                ExactOutcome::Optimal { roster, .. } => assert!(is_feasible(&inst, &roster)),
                other => panic!("seed {seed}: expected optimal, got {other:?}"),
            }
        }
    }

    #[test]
    fn tightness_one_keeps_seeding_roster_feasible() {
        let mut cfg = GeneratorConfig::tiny(3);
        cfg.tightness = 1.0;
        let inst = generate_instance(&cfg).unwrap();
        assert!(matches!(
            exact_solve(&inst, SolveLimits::default()),
            ExactOutcome::Optimal { .. }
        ));
    }

    #[test]
    fn file_round_trip_is_identity() {
        // Seed 0's mix contains all three contract types, so the round trip
        // exercises every contract encoding.
        let inst = generate_instance(&GeneratorConfig::desk(0)).unwrap();
        for variant in [1u8, 2, 3] {
            assert!(
                inst.nurses().iter().any(|n| match n.contract {
                    Contract::Days { .. } => variant == 1,
                    Contract::Nights { .. } => variant == 2,
                    Contract::Both { .. } => variant == 3,
                }),
                "contract variant {variant} missing from the fixture"
            );
        }
        let dir = std::env::temp_dir().join(format!("rostering-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("round-trip.json");
        write_instance(&inst, &path).unwrap();
        let restored = read_instance(&path).unwrap();
        assert_eq!(inst, restored);
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn parse_rejects_wrong_demand_shape() {
        let mut json = serde_json::json!({
            "version": 1,
            "grades": 1,
            "nurses": [{"grade": 1, "contract": {"type": "days", "shifts": 1}}],
            "patterns": ["10000000000000"],
            "pref_cost": [[0]],
            "demand": [[0]]
        });
        json["demand"] = serde_json::json!(vec![vec![0u32]; 13]);
        let err = parse_instance(&json.to_string(), "test").unwrap_err();
        assert!(matches!(err, InstanceError::Invalid { .. }), "{err}");
    }

    #[test]
    fn parse_rejects_unknown_fields_and_empty_feasible_sets() {
        let unknown = r#"{"version":1,"grades":1,"nurses":[],"patterns":[],"pref_cost":[],"demand":[],"extra":1}"#;
        assert!(matches!(parse_instance(unknown, "test"), Err(InstanceError::Parse { .. })));

        // Nurse contracted for 2 nights, catalog only has a 1-day pattern.
        let empty_feasible = serde_json::json!({
            "version": 1,
            "grades": 1,
            "nurses": [{"grade": 1, "contract": {"type": "nights", "shifts": 2}}],
            "patterns": ["10000000000000"],
            "pref_cost": [[0]],
            "demand": vec![vec![0u32]; SLOT_COUNT]
        });
        let err = parse_instance(&empty_feasible.to_string(), "test").unwrap_err();
        match err {
            InstanceError::Invalid { source, .. } => {
                assert_eq!(source, ProblemError::EmptyFeasibleSet { nurse: 0 });
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn parse_rejects_wrong_version() {
        let json = r#"{"version":2,"grades":1,"nurses":[],"patterns":[],"pref_cost":[],"demand":[]}"#;
        assert!(matches!(parse_instance(json, "t"), Err(InstanceError::Version { got: 2, .. })));
    }
}

