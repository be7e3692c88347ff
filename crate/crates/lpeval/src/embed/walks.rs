//! Random-walk corpus generation: uniform (DeepWalk) and second-order
//! biased (Node2vec) strategies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::{Graph, NodeId};

use super::EmbedError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkStrategy {
    Uniform,
    /// Node2vec transition weights: 1/p back to the previous node, 1 to a
    /// common neighbor of the previous node, 1/q otherwise.
    Biased { p: f64, q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub strategy: WalkStrategy,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { walks_per_node: 10, walk_length: 80, strategy: WalkStrategy::Uniform, seed: 0 }
    }
}

impl WalkConfig {
    fn validate(&self) -> Result<(), EmbedError> {
        if self.walks_per_node < 1 {
            return Err(EmbedError::Config("walks_per_node must be >= 1".into()));
        }
        if self.walk_length < 2 {
            return Err(EmbedError::Config("walk_length must be >= 2".into()));
        }
        if let WalkStrategy::Biased { p, q } = self.strategy {
            if p <= 0.0 || q <= 0.0 {
                return Err(EmbedError::Config("node2vec p and q must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Generates `walks_per_node * n` walks of exactly `walk_length` nodes.
///
/// Each walk draws from its own counter-derived ChaCha stream, so the
/// corpus is identical for a given seed no matter how many threads run.
pub fn generate_walks(graph: &Graph, config: &WalkConfig) -> Result<Vec<Vec<NodeId>>, EmbedError> {
    config.validate()?;
    let n = graph.node_count();
    let total = config.walks_per_node * n;
    let walks: Vec<Vec<NodeId>> = (0..total)
        .into_par_iter()
        .map(|walk_idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(walk_idx as u64 + 1);
            let start = (walk_idx % n) as NodeId;
            match config.strategy {
                WalkStrategy::Uniform => uniform_walk(graph, start, config.walk_length, &mut rng),
                WalkStrategy::Biased { p, q } => biased_walk(graph, start, config.walk_length, p, q, &mut rng),
            }
        })
        .collect();
    Ok(walks)
}

fn uniform_walk<R: Rng>(graph: &Graph, start: NodeId, length: usize, rng: &mut R) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(length);
    walk.push(start);
    let mut current = start;
    for _ in 1..length {
        let nbrs = graph.neighbors(current).unwrap();
        current = nbrs[rng.gen_range(0..nbrs.len())];
        walk.push(current);
    }
    walk
}

fn biased_walk<R: Rng>(
    graph: &Graph,
    start: NodeId,
    length: usize,
    p: f64,
    q: f64,
    rng: &mut R,
) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(length);
    walk.push(start);
    let nbrs = graph.neighbors(start).unwrap();
    let mut current = nbrs[rng.gen_range(0..nbrs.len())];
    walk.push(current);
    let mut previous = start;
    let mut weights: Vec<f64> = Vec::new();
    for _ in 2..length {
        let candidates = graph.neighbors(current).unwrap();
        weights.clear();
        let mut acc = 0.0;
        for &y in candidates {
            let w = if y == previous {
                1.0 / p
            } else if graph.has_edge(previous, y) {
                1.0
            } else {
                1.0 / q
            };
            acc += w;
            weights.push(acc);
        }
        let t = rng.gen::<f64>() * acc;
        let k = weights.partition_point(|&c| c <= t).min(candidates.len() - 1);
        previous = current;
        current = candidates[k];
        walk.push(current);
    }
    walk
}
