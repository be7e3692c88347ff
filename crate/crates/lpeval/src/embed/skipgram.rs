//! Skip-gram embedding training with negative sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::NodeId;

use super::EmbedError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 128,
            window: 10,
            negatives: 5,
            epochs: 5,
            lr_start: 0.025,
            lr_end: 1e-4,
            seed: 0,
        }
    }
}

impl SkipGramConfig {
    fn validate(&self) -> Result<(), EmbedError> {
        if self.dim < 2 {
            return Err(EmbedError::Config("embedding dim must be >= 2".into()));
        }
        if self.window < 1 {
            return Err(EmbedError::Config("window must be >= 1".into()));
        }
        if self.negatives < 1 {
            return Err(EmbedError::Config("negatives must be >= 1".into()));
        }
        Ok(())
    }
}

/// One d-dimensional vector per node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(nodes: usize, dim: usize) -> EmbeddingMatrix {
        EmbeddingMatrix { dim, data: vec![0.0; nodes * dim] }
    }

    pub fn node_count(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn vector(&self, u: NodeId) -> &[f64] {
        let i = u as usize * self.dim;
        &self.data[i..i + self.dim]
    }

    fn vector_mut(&mut self, u: NodeId) -> &mut [f64] {
        let i = u as usize * self.dim;
        &mut self.data[i..i + self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> EmbeddingMatrix {
        let dim = rows.first().map_or(0, Vec::len);
        EmbeddingMatrix { dim, data: rows.into_iter().flatten().collect() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrainStats {
    /// Mean negative-sampling loss per epoch.
    pub epoch_mean_loss: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^t) without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Loss and gradients of one negative-sampling step:
/// `L = -ln s(x.c) - sum_j ln s(-x.n_j)` for center `x`, context `c` and
/// negative context vectors `n_j`.
///
/// Returns `(loss, grad_center, grad_context, grad_negatives)`.
pub fn ns_loss_and_grad(
    center: &[f64],
    context: &[f64],
    negatives: &[&[f64]],
) -> (f64, Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let d = center.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let pos_dot = dot(center, context);
    let mut loss = softplus(-pos_dot);
    let pos_coeff = sigmoid(pos_dot) - 1.0;

    let mut grad_center: Vec<f64> = context.iter().map(|c| pos_coeff * c).collect();
    let grad_context: Vec<f64> = center.iter().map(|x| pos_coeff * x).collect();
    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for neg in negatives {
        let neg_dot = dot(center, neg);
        loss += softplus(neg_dot);
        let coeff = sigmoid(neg_dot);
        for i in 0..d {
            grad_center[i] += coeff * neg[i];
        }
        grad_negatives.push(center.iter().map(|x| coeff * x).collect());
    }
    (loss, grad_center, grad_context, grad_negatives)
}

/// Cumulative unigram^(3/4) distribution over nodes, for negative draws.
struct NegativeTable {
    cumulative: Vec<f64>,
}

impl NegativeTable {
    fn build(node_count: usize, corpus: &[Vec<NodeId>]) -> NegativeTable {
        let mut counts = vec![0u64; node_count];
        for walk in corpus {
            for &node in walk {
                counts[node as usize] += 1;
            }
        }
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NegativeTable { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> NodeId {
        let total = *self.cumulative.last().unwrap();
        let t = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= t) as NodeId
    }
}

/// Trains skip-gram center vectors over the walk corpus with SGD and
/// negative sampling. Single-threaded by design: updates are applied in a
/// fixed order so a seed pins the result exactly.
pub fn train_skipgram(
    node_count: usize,
    corpus: &[Vec<NodeId>],
    config: &SkipGramConfig,
) -> Result<(EmbeddingMatrix, TrainStats), EmbedError> {
    config.validate()?;
    if corpus.is_empty() || corpus.iter().all(|w| w.len() < 2) {
        return Err(EmbedError::EmptyCorpus);
    }
    let d = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut center = EmbeddingMatrix::new(node_count, d);
    for x in &mut center.data {
        *x = (rng.gen::<f64>() - 0.5) / d as f64;
    }
    let mut context = EmbeddingMatrix::new(node_count, d);

    if config.epochs == 0 {
        return Ok((center, TrainStats::default()));
    }

    let table = NegativeTable::build(node_count, corpus);
    let pairs_per_epoch: usize = corpus
        .iter()
        .map(|walk| {
            (0..walk.len())
                .map(|i| (i.min(config.window)) + ((walk.len() - 1 - i).min(config.window)))
                .sum::<usize>()
        })
        .sum();
    let total_updates = (config.epochs * pairs_per_epoch).max(1);

    let mut stats = TrainStats::default();
    let mut update = 0usize;
    let mut negatives = vec![0 as NodeId; config.negatives];
    for epoch in 0..config.epochs {
        let mut epoch_loss = 0.0;
        let mut epoch_pairs = 0usize;
        for walk in corpus {
            for i in 0..walk.len() {
                let lo = i.saturating_sub(config.window);
                let hi = (i + config.window).min(walk.len() - 1);
                for j in lo..=hi {
                    if i == j {
                        continue;
                    }
                    let lr = config.lr_start
                        + (config.lr_end - config.lr_start) * (update as f64 / total_updates as f64);
                    update += 1;

                    let (center_node, context_node) = (walk[i], walk[j]);
                    for slot in negatives.iter_mut() {
                        *slot = table.sample(&mut rng);
                    }
                    let loss = sgd_step(
                        &mut center,
                        &mut context,
                        center_node,
                        context_node,
                        &negatives,
                        lr,
                    );
                    if !loss.is_finite() {
                        return Err(EmbedError::Numerical(format!(
                            "non-finite loss at epoch {epoch}, update {update}"
                        )));
                    }
                    epoch_loss += loss;
                    epoch_pairs += 1;
                }
            }
        }
        stats.epoch_mean_loss.push(epoch_loss / epoch_pairs as f64);
    }
    if !center.is_finite() {
        return Err(EmbedError::Numerical("non-finite embedding after training".into()));
    }
    Ok((center, stats))
}

fn sgd_step(
    center: &mut EmbeddingMatrix,
    context: &mut EmbeddingMatrix,
    center_node: NodeId,
    context_node: NodeId,
    negatives: &[NodeId],
    lr: f64,
) -> f64 {
    let d = center.dim;
    let x = center.vector(center_node);
    let neg_vecs: Vec<&[f64]> = negatives.iter().map(|&n| context.vector(n)).collect();
    let (loss, grad_center, grad_context, grad_negatives) =
        ns_loss_and_grad(x, context.vector(context_node), &neg_vecs);

    {
        let c = context.vector_mut(context_node);
        for i in 0..d {
            c[i] -= lr * grad_context[i];
        }
    }
    for (&n, grad) in negatives.iter().zip(&grad_negatives) {
        let nv = context.vector_mut(n);
        for i in 0..d {
            nv[i] -= lr * grad[i];
        }
    }
    let xv = center.vector_mut(center_node);
    for i in 0..d {
        xv[i] -= lr * grad_center[i];
    }
    loss
}
