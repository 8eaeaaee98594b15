//! Experiment configuration: which instances, which algorithm presets, how
//! many seeded trials, and which alpha values to analyse with.

use crate::presets::{lookup, AlgorithmPreset};
use rostering_core::instances::GeneratorConfig;
use serde::Deserialize;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid experiment config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Preset(#[from] crate::presets::PresetError),
}

/// Instances either come from files or are generated on the fly.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceSource {
    /// Paths to instance JSON files.
    Paths(Vec<PathBuf>),
    /// Generate `count` instances; instance i uses a sub-seed derived from
    /// the generator seed and i, and is named `gen-<seed>-<i>`.
    Generate {
        count: usize,
        config: GeneratorConfig,
    },
}

/// A preset reference: a built-in name, or an inline definition.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmRef {
    Name(String),
    Inline(AlgorithmPreset),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: InstanceSource,
    pub algorithms: Vec<AlgorithmRef>,
    /// Seeded trials per (algorithm, instance) cell.
    pub trials: u32,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// Output directory; the CLI `--out` flag overrides it.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_alphas() -> Vec<f64> {
    vec![1.0]
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: display.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: display,
            source,
        })
    }

    /// Resolves preset references and checks global invariants. Fails fast
    /// before any trial runs.
    pub fn resolve_algorithms(&self) -> Result<Vec<AlgorithmPreset>, ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(ConfigError::Invalid("at least one algorithm is required".into()));
        }
        for &alpha in &self.alphas {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(ConfigError::Invalid(format!(
                    "alpha values must be in [0, 1], got {alpha}"
                )));
            }
        }
        let mut resolved = Vec::with_capacity(self.algorithms.len());
        for algorithm in &self.algorithms {
            let preset = match algorithm {
                AlgorithmRef::Name(name) => lookup(name)?.clone(),
                AlgorithmRef::Inline(preset) => {
                    preset.validate()?;
                    preset.clone()
                }
            };
            resolved.push(preset);
        }
        let mut names: Vec<&str> = resolved.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        if let Some(dup) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(ConfigError::Invalid(format!(
                "algorithm name {:?} appears more than once",
                dup[0]
            )));
        }
        if let Some(bad) = resolved
            .iter()
            .find(|p| p.name.is_empty() || p.name.contains(',') || p.name.contains('\n'))
        {
            return Err(ConfigError::Invalid(format!(
                "algorithm name {:?} is empty or contains a comma/newline",
                bad.name
            )));
        }
        Ok(resolved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(trials: u32, algorithms: &str) -> String {
        format!(
            r#"{{
                "instances": {{"generate": {{"count": 1, "config": {{
                    "nurse_count": 4, "grade_count": 1,
                    "contract_mix": {{"day_weight": 1.0, "night_weight": 0.0, "combined_weight": 0.0,
                                      "day_shifts": [1]}},
                    "tightness": 0.8, "max_cost": 10, "seed": 1
                }}}}}},
                "algorithms": {algorithms},
                "trials": {trials}
            }}"#
        )
    }

    #[test]
    fn parses_and_resolves_builtin_names() {
        let cfg: ExperimentConfig = serde_json::from_str(&minimal(3, r#"["V1", "V6"]"#)).unwrap();
        let algorithms = cfg.resolve_algorithms().unwrap();
        assert_eq!(algorithms.len(), 2);
        assert_eq!(cfg.alphas, vec![1.0]);
    }

    #[test]
    fn rejects_duplicates_zero_trials_and_unknown_names() {
        let cfg: ExperimentConfig =
            serde_json::from_str(&minimal(3, r#"["V1", "V1"]"#)).unwrap();
        assert!(matches!(cfg.resolve_algorithms(), Err(ConfigError::Invalid(_))));

        let cfg: ExperimentConfig = serde_json::from_str(&minimal(0, r#"["V1"]"#)).unwrap();
        assert!(matches!(cfg.resolve_algorithms(), Err(ConfigError::Invalid(_))));

        let cfg: ExperimentConfig = serde_json::from_str(&minimal(1, r#"["nope"]"#)).unwrap();
        assert!(matches!(cfg.resolve_algorithms(), Err(ConfigError::Preset(_))));
    }

    #[test]
    fn inline_presets_are_validated() {
        let inline = r#"[{"name": "custom", "kind": "direct",
                          "ga": {"crossover": "order"}}]"#;
        let cfg: ExperimentConfig = serde_json::from_str(&minimal(1, inline)).unwrap();
        assert!(matches!(cfg.resolve_algorithms(), Err(ConfigError::Preset(_))));

        let good = r#"[{"name": "custom", "kind": "direct",
                        "ga": {"crossover": "one_point"}}]"#;
        let cfg: ExperimentConfig = serde_json::from_str(&minimal(1, good)).unwrap();
        assert_eq!(cfg.resolve_algorithms().unwrap()[0].name, "custom");
    }
}
