//! TOML configuration files.
//!
//! ```toml
//! [similarity]
//! alpha = 0.5
//! epsilon = 0.99
//! delta = 0.5
//! merge_threshold = 0.7
//! neighborhood = "set"          # or "multiset"
//!
//! [similarity.attr_weights]
//! name = 1.0
//!
//! [expansion]
//! d_star = 3
//! exact_beyond_level0 = true
//! # adaptive_h = 4.0
//! # adaptive_a = 0.2
//! adaptive_depth = false
//! initials_cutoff = 10
//!
//! [resolution]
//! bootstrap = "exact_name"      # or "singletons"
//! bootstrap_max_ambiguity = 0.15
//! ambiguity = "conditional"     # or "naive"
//! secondary = "forenames"       # or "first_initial"
//! epsilon_outermost = true
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{AmbiguityMode, ExpansionParams, Secondary};
use crate::query::{EngineConfig, ResolutionConfig};
use crate::rcer::Bootstrap;
use crate::similarity::SimilarityConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BootstrapKind {
    Singletons,
    ExactName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum AmbiguityKind {
    Naive,
    Conditional,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileResolution {
    #[serde(default = "default_bootstrap")]
    bootstrap: BootstrapKind,
    #[serde(default = "default_cutoff")]
    bootstrap_max_ambiguity: f64,
    #[serde(default = "default_ambiguity")]
    ambiguity: AmbiguityKind,
    #[serde(default)]
    secondary: Secondary,
    #[serde(default = "yes")]
    epsilon_outermost: bool,
}

fn default_bootstrap() -> BootstrapKind {
    BootstrapKind::Singletons
}

fn default_cutoff() -> f64 {
    0.15
}

fn default_ambiguity() -> AmbiguityKind {
    AmbiguityKind::Conditional
}

fn yes() -> bool {
    true
}

impl Default for FileResolution {
    fn default() -> Self {
        FileResolution {
            bootstrap: default_bootstrap(),
            bootstrap_max_ambiguity: default_cutoff(),
            ambiguity: default_ambiguity(),
            secondary: Secondary::default(),
            epsilon_outermost: true,
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    similarity: SimilarityConfig,
    #[serde(default)]
    expansion: ExpansionParams,
    #[serde(default)]
    resolution: FileResolution,
}

impl From<FileResolution> for ResolutionConfig {
    fn from(f: FileResolution) -> Self {
        ResolutionConfig {
            bootstrap: match f.bootstrap {
                BootstrapKind::Singletons => Bootstrap::Singletons,
                BootstrapKind::ExactName => Bootstrap::ExactName { max_ambiguity: f.bootstrap_max_ambiguity },
            },
            ambiguity: match f.ambiguity {
                AmbiguityKind::Naive => AmbiguityMode::Naive,
                AmbiguityKind::Conditional => AmbiguityMode::Conditional,
            },
            secondary: f.secondary,
            epsilon_outermost: f.epsilon_outermost,
        }
    }
}

impl From<&ResolutionConfig> for FileResolution {
    fn from(r: &ResolutionConfig) -> Self {
        let (bootstrap, cutoff) = match r.bootstrap {
            Bootstrap::Singletons => (BootstrapKind::Singletons, default_cutoff()),
            Bootstrap::ExactName { max_ambiguity } => (BootstrapKind::ExactName, max_ambiguity),
        };
        FileResolution {
            bootstrap,
            bootstrap_max_ambiguity: cutoff,
            ambiguity: match r.ambiguity {
                AmbiguityMode::Naive => AmbiguityKind::Naive,
                AmbiguityMode::Conditional => AmbiguityKind::Conditional,
            },
            secondary: r.secondary,
            epsilon_outermost: r.epsilon_outermost,
        }
    }
}

/// Parses and validates a configuration document.
pub fn from_toml_str(text: &str) -> Result<EngineConfig> {
    let file: FileConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let cfg = EngineConfig { similarity: file.similarity, expansion: file.expansion, resolution: file.resolution.into() };
    cfg.validate()?;
    Ok(cfg)
}

pub fn from_path(path: &Path) -> Result<EngineConfig> {
    from_toml_str(&std::fs::read_to_string(path)?)
}

/// Renders a configuration in the file format accepted by [`from_toml_str`].
pub fn to_toml_string(cfg: &EngineConfig) -> Result<String> {
    let file = FileConfig { similarity: cfg.similarity.clone(), expansion: cfg.expansion.clone(), resolution: (&cfg.resolution).into() };
    toml::to_string(&file).map_err(|e| Error::InvalidConfig(e.to_string()))
}
