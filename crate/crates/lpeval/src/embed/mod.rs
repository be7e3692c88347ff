//! Learning-based link prediction: random-walk node embeddings, edge
//! feature operators and cross-validated logistic-regression scoring.

mod classify;
mod skipgram;
mod walks;

pub use classify::out_of_fold_scores;
pub use skipgram::{ns_loss_and_grad, train_skipgram, EmbeddingMatrix, SkipGramConfig, TrainStats};
pub use walks::{generate_walks, WalkConfig, WalkStrategy};

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("edge operator on mismatched dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("walk corpus is empty")]
    EmptyCorpus,
    #[error("stratification failure: {positives} positives / {negatives} negatives cannot fill {folds} folds with both classes")]
    StratificationFailure { positives: usize, negatives: usize, folds: usize },
    #[error("cache i/o: {0}")]
    CacheIo(String),
}

/// Elementwise combination of two node vectors into one edge vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeOperator {
    Average,
    Hadamard,
    WeightedL1,
    WeightedL2,
}

impl EdgeOperator {
    pub const ALL: [EdgeOperator; 4] = [
        EdgeOperator::Average,
        EdgeOperator::Hadamard,
        EdgeOperator::WeightedL1,
        EdgeOperator::WeightedL2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeOperator::Average => "Avg",
            EdgeOperator::Hadamard => "Hada",
            EdgeOperator::WeightedL1 => "L1",
            EdgeOperator::WeightedL2 => "L2",
        }
    }

    pub fn parse(name: &str) -> Option<EdgeOperator> {
        EdgeOperator::ALL.into_iter().find(|op| op.name() == name)
    }
}

/// Applies an edge operator to two equal-length vectors.
pub fn embed_edge(fu: &[f64], fv: &[f64], op: EdgeOperator) -> Result<Vec<f64>, EmbedError> {
    if fu.len() != fv.len() {
        return Err(EmbedError::DimensionMismatch(fu.len(), fv.len()));
    }
    Ok(fu
        .iter()
        .zip(fv)
        .map(|(x, y)| match op {
            EdgeOperator::Average => (x + y) / 2.0,
            EdgeOperator::Hadamard => x * y,
            EdgeOperator::WeightedL1 => (x - y).abs(),
            EdgeOperator::WeightedL2 => (x - y) * (x - y),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EmbeddingKind {
    DeepWalk,
    Node2vec,
}

impl EmbeddingKind {
    pub fn name(self) -> &'static str {
        match self {
            EmbeddingKind::DeepWalk => "DW",
            EmbeddingKind::Node2vec => "N2V",
        }
    }
}

/// One learning-based method: embedding x edge operator x classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LearningMethod {
    pub embedding: EmbeddingKind,
    pub operator: EdgeOperator,
}

impl LearningMethod {
    /// `DW_Avg_LR`-style name.
    pub fn name(&self) -> String {
        format!("{}_{}_LR", self.embedding.name(), self.operator.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDescriptor {
    pub name: String,
    /// `None` for recognized-but-unimplemented names (GraphSAGE, RF).
    pub method: Option<LearningMethod>,
}

impl MethodDescriptor {
    pub fn implemented(&self) -> bool {
        self.method.is_some()
    }
}

/// The in-scope learning roster:
/// {DW, N2V} x {Avg, Hada, L1, L2} x {LR}, eight methods.
pub fn enumerate_learning_methods() -> Vec<MethodDescriptor> {
    let mut out = Vec::with_capacity(8);
    for embedding in [EmbeddingKind::DeepWalk, EmbeddingKind::Node2vec] {
        for operator in EdgeOperator::ALL {
            let method = LearningMethod { embedding, operator };
            out.push(MethodDescriptor { name: method.name(), method: Some(method) });
        }
    }
    out
}

/// Parses a `(embedding)_(aggregator-if-applicable)_(operator)_(classifier)`
/// method name. GraphSAGE and random-forest names parse as valid but carry
/// no runnable method.
pub fn parse_method_name(name: &str) -> Option<MethodDescriptor> {
    let parts: Vec<&str> = name.split('_').collect();
    let (embedding, operator, classifier) = match parts.as_slice() {
        [emb, op, clf] if *emb == "DW" || *emb == "N2V" => (*emb, *op, *clf),
        [emb, agg, op, clf] if *emb == "GS" => {
            if !["Mean", "MeanPool", "MaxPool", "LSTM"].contains(agg) {
                return None;
            }
            (*emb, *op, *clf)
        }
        _ => return None,
    };
    let op = EdgeOperator::parse(operator)?;
    if classifier != "LR" && classifier != "RF" {
        return None;
    }
    let method = match (embedding, classifier) {
        ("DW", "LR") => Some(LearningMethod { embedding: EmbeddingKind::DeepWalk, operator: op }),
        ("N2V", "LR") => Some(LearningMethod { embedding: EmbeddingKind::Node2vec, operator: op }),
        _ => None, // GS_* or *_RF: recognized, not implemented
    };
    Some(MethodDescriptor { name: name.to_string(), method })
}

/// Trains the node embedding for one graph: walk corpus plus skip-gram.
pub fn train_node_embedding(
    graph: &Graph,
    kind: EmbeddingKind,
    walk_config: &WalkConfig,
    sg_config: &SkipGramConfig,
) -> Result<(EmbeddingMatrix, TrainStats), EmbedError> {
    let strategy = match kind {
        EmbeddingKind::DeepWalk => WalkStrategy::Uniform,
        EmbeddingKind::Node2vec => match walk_config.strategy {
            biased @ WalkStrategy::Biased { .. } => biased,
            WalkStrategy::Uniform => WalkStrategy::Biased { p: 1.0, q: 1.0 },
        },
    };
    let config = WalkConfig { strategy, ..*walk_config };
    let corpus = generate_walks(graph, &config)?;
    train_skipgram(graph.node_count(), &corpus, sg_config)
}

/// Writes the embedding cache: a digest header plus one `label v1 .. vd`
/// row per node.
pub fn write_embedding_cache<W: Write>(
    mut out: W,
    graph: &Graph,
    matrix: &EmbeddingMatrix,
    seed: u64,
    digest: &str,
) -> Result<(), EmbedError> {
    let io = |e: std::io::Error| EmbedError::CacheIo(e.to_string());
    writeln!(
        out,
        "# n={} d={} seed={} digest={}",
        matrix.node_count(),
        matrix.dim,
        seed,
        digest
    )
    .map_err(io)?;
    for (u, row) in matrix.rows().enumerate() {
        write!(out, "{}", graph.label(u as u32)).map_err(io)?;
        for x in row {
            write!(out, " {x:?}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    Ok(())
}

/// Reads a cache written by [`write_embedding_cache`]; returns `None` if
/// the stored digest does not match.
pub fn read_embedding_cache<R: BufRead>(
    reader: R,
    graph: &Graph,
    digest: &str,
) -> Result<Option<EmbeddingMatrix>, EmbedError> {
    let io = |e: std::io::Error| EmbedError::CacheIo(e.to_string());
    let mut lines = reader.lines();
    let Some(header) = lines.next() else {
        return Ok(None);
    };
    let header = header.map_err(io)?;
    if !header.contains(&format!("digest={digest}")) {
        return Ok(None);
    }
    let mut rows: Vec<(u32, Vec<f64>)> = Vec::with_capacity(graph.node_count());
    for line in lines {
        let line = line.map_err(io)?;
        let mut fields = line.split_whitespace();
        let label = fields.next().ok_or_else(|| EmbedError::CacheIo("blank row".into()))?;
        let Some(u) = graph.node_id(label) else {
            return Ok(None); // stale cache for a different graph
        };
        let row: Result<Vec<f64>, _> = fields.map(str::parse::<f64>).collect();
        let row = row.map_err(|e| EmbedError::CacheIo(e.to_string()))?;
        rows.push((u, row));
    }
    if rows.len() != graph.node_count() {
        return Ok(None);
    }
    rows.sort_by_key(|(u, _)| *u);
    Ok(Some(EmbeddingMatrix::from_rows(rows.into_iter().map(|(_, r)| r).collect())))
}
