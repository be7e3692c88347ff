//! Experiment orchestration: configuration, the staged pipeline, result
//! persistence, the comparison battery and report rendering.

pub mod compare;
pub mod config;
pub mod pipeline;
pub mod report;
pub mod store;

pub use compare::{compare_all, ComparisonReport, MetricAxis};
pub use config::{default_roster, derive_seed, method_group, MethodGroup, RunConfig};
pub use pipeline::{load_split, load_store, run_pipeline};
pub use store::{CellKey, Manifest, OutputLayout, ResultStore};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("storage error: {0}")]
    Store(String),
    #[error("stage error: {0}")]
    Stage(String),
}
