//! Link-prediction evaluation toolkit.
//!
//! Builds graphs from raw interaction logs, generates future- and
//! missing-link ground truth with distance-stratified negatives, scores
//! pairs with similarity- and embedding-based methods, evaluates them
//! with skew-aware metrics, and runs the statistical comparison battery
//! over the results.

pub mod embed;
pub mod graph;
pub mod harness;
pub mod ingest;
pub mod metrics;
pub mod sim;
pub mod split;
pub mod stats;
