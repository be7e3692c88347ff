//! Run configuration, seed derivation and the method roster.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embed;
use crate::sim::{MethodFamily, SimilarityMethod};
use crate::split::PredictionType;

use super::HarnessError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub temporal: bool,
    #[serde(default)]
    pub directed: bool,
    /// Defaults to future+missing for temporal datasets, missing otherwise.
    #[serde(default)]
    pub prediction_types: Option<Vec<PredictionType>>,
}

impl DatasetConfig {
    pub fn prediction_types(&self) -> Vec<PredictionType> {
        match &self.prediction_types {
            Some(list) => list.clone(),
            None if self.temporal => vec![PredictionType::Future, PredictionType::Missing],
            None => vec![PredictionType::Missing],
        }
    }
}

fn default_train_frac() -> f64 {
    crate::split::DEFAULT_TRAIN_FRAC
}
fn default_removal_frac() -> f64 {
    crate::split::DEFAULT_REMOVAL_FRAC
}
fn default_skew_ratio() -> usize {
    crate::split::DEFAULT_SKEW_RATIO
}
fn default_folds() -> usize {
    5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KatzConfig {
    pub beta: f64,
    pub length: usize,
}

impl Default for KatzConfig {
    fn default() -> Self {
        KatzConfig { beta: crate::sim::DEFAULT_KATZ_BETA, length: crate::sim::DEFAULT_KATZ_LENGTH }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkSettings {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub p: f64,
    pub q: f64,
}

impl Default for WalkSettings {
    fn default() -> Self {
        WalkSettings { walks_per_node: 10, walk_length: 80, p: 1.0, q: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkipGramSettings {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
}

impl Default for SkipGramSettings {
    fn default() -> Self {
        SkipGramSettings { dim: 128, window: 10, negatives: 5, epochs: 5 }
    }
}

/// Everything one `run-all` needs; JSON on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub datasets: Vec<DatasetConfig>,
    /// Method roster; `None` means all eighteen in-scope methods.
    #[serde(default)]
    pub methods: Option<Vec<String>>,
    pub seed: u64,
    pub out_dir: PathBuf,
    #[serde(default = "default_train_frac")]
    pub train_frac: f64,
    #[serde(default = "default_removal_frac")]
    pub removal_frac: f64,
    #[serde(default = "default_skew_ratio")]
    pub skew_ratio: usize,
    #[serde(default = "default_folds")]
    pub cv_folds: usize,
    #[serde(default)]
    pub katz: KatzConfig,
    #[serde(default)]
    pub walks: WalkSettings,
    #[serde(default)]
    pub skipgram: SkipGramSettings,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    /// Validates dataset uniqueness, prediction-type/temporal consistency
    /// and input paths.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.datasets.is_empty() {
            return Err(HarnessError::Config("no datasets configured".into()));
        }
        let mut seen = BTreeSet::new();
        for ds in &self.datasets {
            if !seen.insert(ds.name.as_str()) {
                return Err(HarnessError::Config(format!("duplicate dataset name {:?}", ds.name)));
            }
            if !ds.temporal && ds.prediction_types().contains(&PredictionType::Future) {
                return Err(HarnessError::Config(format!(
                    "dataset {:?} requests future prediction without timestamps",
                    ds.name
                )));
            }
            if !ds.path.exists() {
                return Err(HarnessError::Config(format!(
                    "dataset {:?}: path {} does not exist",
                    ds.name,
                    ds.path.display()
                )));
            }
        }
        if !(0.0..1.0).contains(&self.removal_frac) || !(0.0..=1.0).contains(&self.train_frac) {
            return Err(HarnessError::Config("fractions must lie in the unit interval".into()));
        }
        for name in self.roster() {
            if method_group(&name).is_none() {
                return Err(HarnessError::Config(format!("unknown or unimplemented method {name:?}")));
            }
        }
        Ok(())
    }

    /// Method names this run scores, in a fixed order.
    pub fn roster(&self) -> Vec<String> {
        match &self.methods {
            Some(list) => list.clone(),
            None => default_roster(),
        }
    }

    /// Hex digest of the canonical JSON form, pinned into manifests and
    /// embedding caches.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex_of(&hasher.finalize()[..8])
    }
}

fn hex_of(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// All eighteen in-scope methods: ten similarity, eight learning.
pub fn default_roster() -> Vec<String> {
    let mut out: Vec<String> = SimilarityMethod::ALL.iter().map(|m| m.name().to_string()).collect();
    out.extend(embed::enumerate_learning_methods().into_iter().map(|d| d.name));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MethodGroup {
    LocalSim,
    GlobalSim,
    Learning,
}

impl MethodGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodGroup::LocalSim => "local-sim",
            MethodGroup::GlobalSim => "global-sim",
            MethodGroup::Learning => "learning",
        }
    }
}

/// Group of a roster method name; `None` for unknown or unimplemented.
pub fn method_group(name: &str) -> Option<MethodGroup> {
    if let Some(m) = SimilarityMethod::parse(name) {
        return Some(match m.family() {
            MethodFamily::Local => MethodGroup::LocalSim,
            MethodFamily::Global => MethodGroup::GlobalSim,
        });
    }
    match embed::parse_method_name(name) {
        Some(d) if d.implemented() => Some(MethodGroup::Learning),
        _ => None,
    }
}

/// Independent seed stream per (stage, labels), so adding a dataset never
/// perturbs another dataset's draws.
pub fn derive_seed(master: u64, labels: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for label in labels {
        hasher.update([0u8]);
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}
