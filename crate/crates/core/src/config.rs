//! Run configuration read from TOML.
//!
//! ```toml
//! [data]
//! edges = "edges.tsv"
//! types = "types.tsv"
//! labels = "labels.tsv"        # needed by `eval`
//!
//! [sampling]
//! cutoff = 0.3                 # fraction of ranked contexts removed per round
//! rounds = 3
//! removable_types = ["P", "S"]
//! budget_multiplier = 200.0    # round-0 budget = multiplier * |V|
//! attenuation = 0.5
//! pairs_per_walk = 5
//!
//! [training]                   # any TrainConfig field
//! dim = 128
//!
//! [eval]
//! train_fraction = 0.8
//! repeats = 10
//!
//! [entropy]
//! walks_per_node = 20
//! walk_length = 10
//! window = 5
//!
//! [run]
//! seed = 42
//! output_dir = "out"
//! workers = 1
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.
//! The master seed feeds sampling, training and evaluation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coarsener::{removable_types, CoarsenConfig};
use crate::diagnostics::WindowBaseline;
use crate::embedder::TrainConfig;
use crate::error::{Error, Result};
use crate::eval::SplitSpec;
use crate::hin::Hin;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub edges: PathBuf,
    pub types: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub cutoff: f64,
    pub rounds: usize,
    pub removable_types: Vec<String>,
    pub budget_multiplier: f64,
    pub attenuation: f64,
    pub pairs_per_walk: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            cutoff: 0.3,
            rounds: 3,
            removable_types: Vec::new(),
            budget_multiplier: 200.0,
            attenuation: 0.5,
            pairs_per_walk: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: 0,
            output_dir: PathBuf::from("out"),
            workers: 1,
        }
    }
}

/// Training settings as written in the file; the seed and worker count come
/// from `[run]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSection {
    pub dim: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub batch_size: usize,
    pub negative_exponent: f64,
    pub train_pair_type: bool,
}

impl Default for TrainingSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainingSection {
            dim: d.dim,
            negatives: d.negatives,
            epochs: d.epochs,
            learning_rate: d.learning_rate,
            adam_beta1: d.adam_beta1,
            adam_beta2: d.adam_beta2,
            adam_epsilon: d.adam_epsilon,
            batch_size: d.batch_size,
            negative_exponent: d.negative_exponent,
            train_pair_type: d.train_pair_type,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub train_fraction: f64,
    pub repeats: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        let d = SplitSpec::default();
        EvalSection {
            train_fraction: d.train_fraction,
            repeats: d.repeats,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub training: TrainingSection,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub entropy: WindowBaseline,
    #[serde(default)]
    pub run: RunSection,
}

fn field_error(field: &str, message: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {message}"))
}

impl RunConfig {
    /// Parses TOML text; relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_owned()))?;
        cfg.resolve_paths(base_dir);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.data.edges);
        fix(&mut self.data.types);
        if let Some(l) = self.data.labels.as_mut() {
            fix(l);
        }
        fix(&mut self.run.output_dir);
    }

    /// Value checks with the offending field named in the message. Input
    /// files must exist.
    pub fn validate(&self) -> Result<()> {
        let exists = |field: &str, p: &Path| {
            if p.is_file() {
                Ok(())
            } else {
                Err(field_error(field, format!("file not found: {}", p.display())))
            }
        };
        exists("data.edges", &self.data.edges)?;
        exists("data.types", &self.data.types)?;
        if let Some(l) = &self.data.labels {
            exists("data.labels", l)?;
        }
        let s = &self.sampling;
        if !(0.0..1.0).contains(&s.cutoff) {
            return Err(field_error("sampling.cutoff", format!("must be in [0, 1), got {}", s.cutoff)));
        }
        if !(s.attenuation > 0.0 && s.attenuation <= 1.0) {
            return Err(field_error(
                "sampling.attenuation",
                format!("must be in (0, 1], got {}", s.attenuation),
            ));
        }
        if !(s.budget_multiplier.is_finite() && s.budget_multiplier > 0.0) {
            return Err(field_error(
                "sampling.budget_multiplier",
                format!("must be positive, got {}", s.budget_multiplier),
            ));
        }
        if s.pairs_per_walk == 0 {
            return Err(field_error("sampling.pairs_per_walk", "must be at least 1"));
        }
        if s.rounds > 0 && s.removable_types.is_empty() {
            return Err(field_error(
                "sampling.removable_types",
                "must list at least one type when rounds > 0",
            ));
        }
        self.train_config()
            .validate()
            .map_err(|e| field_error("training", strip_prefix(e)))?;
        self.split_spec()
            .validate()
            .map_err(|e| field_error("eval", strip_prefix(e)))?;
        self.entropy
            .validate()
            .map_err(|e| field_error("entropy", strip_prefix(e)))?;
        if self.run.workers == 0 {
            return Err(field_error("run.workers", "must be at least 1"));
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.training;
        TrainConfig {
            dim: t.dim,
            negatives: t.negatives,
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            adam_beta1: t.adam_beta1,
            adam_beta2: t.adam_beta2,
            adam_epsilon: t.adam_epsilon,
            batch_size: t.batch_size,
            negative_exponent: t.negative_exponent,
            train_pair_type: t.train_pair_type,
            workers: self.run.workers,
            seed: self.run.seed,
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.eval.train_fraction,
            repeats: self.eval.repeats,
            seed: self.run.seed,
        }
    }

    /// Coarsening settings with type names resolved against `hin`.
    pub fn coarsen_config(&self, hin: &Hin) -> Result<CoarsenConfig> {
        let types = removable_types(hin, &self.sampling.removable_types)
            .map_err(|e| field_error("sampling.removable_types", strip_prefix(e)))?;
        Ok(CoarsenConfig {
            cutoff: self.sampling.cutoff,
            rounds: self.sampling.rounds,
            removable_types: types,
            attenuation: self.sampling.attenuation,
        })
    }

    /// Round-0 sampling budget: `budget_multiplier * |V|`.
    pub fn initial_budget(&self, hin: &Hin) -> f64 {
        self.sampling.budget_multiplier * hin.node_count() as f64
    }

    /// SHA-256 of the canonical JSON form, ignoring the output directory and
    /// worker count, which do not change results.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.run.output_dir = PathBuf::new();
        canonical.run.workers = 1;
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

/// Written next to every command's outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub workers: usize,
    pub versions: std::collections::BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Manifest {
            command: command.to_owned(),
            config_hash: cfg.hash(),
            seed: cfg.run.seed,
            workers: cfg.run.workers,
            versions: [(
                env!("CARGO_PKG_NAME").to_owned(),
                env!("CARGO_PKG_VERSION").to_owned(),
            )]
            .into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_inputs(dir: &Path) {
        std::fs::write(dir.join("edges.tsv"), "a\tb\n").unwrap();
        std::fs::write(dir.join("types.tsv"), "a\tP\nb\tA\n").unwrap();
    }

    const ACM: &str = r#"
[data]
edges = "edges.tsv"
types = "types.tsv"

[sampling]
cutoff = 0.3
rounds = 3
removable_types = ["P", "S"]
budget_multiplier = 200
attenuation = 0.5
pairs_per_walk = 5
"#;

    #[test]
    fn reference_settings_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        write_inputs(dir.path());
        let cfg = RunConfig::from_toml_str(ACM, dir.path()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.sampling.removable_types, ["P", "S"]);
        assert_eq!(cfg.training.dim, 128);
        assert_eq!(cfg.training.epochs, 50);
        assert_eq!(cfg.training.negatives, 5);
        assert_eq!(cfg.data.edges, dir.path().join("edges.tsv"));
    }

    #[test]
    fn cutoff_of_one_is_rejected_by_field() {
        let dir = tempfile::tempdir().unwrap();
        write_inputs(dir.path());
        let text = ACM.replace("cutoff = 0.3", "cutoff = 1.0");
        let cfg = RunConfig::from_toml_str(&text, dir.path()).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("sampling.cutoff"), "{err}");
    }

    #[test]
    fn unknown_keys_and_missing_files_fail() {
        let dir = tempfile::tempdir().unwrap();
        let text = ACM.replace("rounds = 3", "rounds = 3\nbogus = 1");
        assert!(RunConfig::from_toml_str(&text, dir.path()).is_err());
        let cfg = RunConfig::from_toml_str(ACM, dir.path()).unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("data.edges"), "{err}");
    }

    #[test]
    fn hash_ignores_output_location() {
        let dir = tempfile::tempdir().unwrap();
        let a = RunConfig::from_toml_str(ACM, dir.path()).unwrap();
        let mut b = a.clone();
        b.run.output_dir = PathBuf::from("/elsewhere");
        b.run.workers = 8;
        assert_eq!(a.hash(), b.hash());
        b.run.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
