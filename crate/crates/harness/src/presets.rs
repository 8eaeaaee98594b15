//! Named algorithm presets: the 24 solver variants shipped with the binary
//! plus any inline definitions from the experiment config.
//!
//! Each preset bundles a solver kind, a [`GaConfig`] and (for the indirect
//! kind) a [`DecoderConfig`]. The `published` list records which fields come
//! from the published variant descriptions; everything else is a project
//! default, with approximations spelled out in `notes`.

use rostering_core::ga::indirect::DecoderConfig;
use rostering_core::ga::GaConfig;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("unknown algorithm preset {0:?} (built-ins are V1-V8, U1-U8, W1-W8)")]
    Unknown(String),
    #[error("preset {name:?}: {message}")]
    Invalid { name: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Direct,
    Indirect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmPreset {
    pub name: String,
    pub kind: AlgorithmKind,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub decoder: Option<DecoderConfig>,
    /// Fields taken from the published variant descriptions.
    #[serde(default)]
    pub published: Vec<String>,
    #[serde(default)]
    pub notes: Option<String>,
}

impl AlgorithmPreset {
    /// The decoder to use for indirect runs (falls back to the default).
    pub fn decoder_config(&self) -> DecoderConfig {
        self.decoder.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), PresetError> {
        let check = |result: Result<(), rostering_core::ga::GaError>| {
            result.map_err(|e| PresetError::Invalid {
                name: self.name.clone(),
                message: e.to_string(),
            })
        };
        match self.kind {
            AlgorithmKind::Direct => {
                if self.decoder.is_some() {
                    return Err(PresetError::Invalid {
                        name: self.name.clone(),
                        message: "direct presets take no decoder".into(),
                    });
                }
                check(self.ga.validate_direct())
            }
            AlgorithmKind::Indirect => {
                check(self.ga.validate_indirect())?;
                check(self.decoder_config().validate())
            }
        }
    }
}

const VARIANTS_JSON: &str = include_str!("../presets/variants.json");

/// The built-in presets, parsed once.
pub fn builtin_presets() -> &'static [AlgorithmPreset] {
    static PRESETS: OnceLock<Vec<AlgorithmPreset>> = OnceLock::new();
    PRESETS.get_or_init(|| {
        let presets: Vec<AlgorithmPreset> =
            serde_json::from_str(VARIANTS_JSON).expect("bundled preset file parses");
        for preset in &presets {
            preset.validate().expect("bundled presets validate");
        }
        presets
    })
}

pub fn lookup(name: &str) -> Result<&'static AlgorithmPreset, PresetError> {
    builtin_presets()
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| PresetError::Unknown(name.to_string()))
}
