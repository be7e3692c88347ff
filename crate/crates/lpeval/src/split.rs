//! Ground-truth generation: future and missing splits, hop bucketing, and
//! distance-stratified negative sampling at a controlled skew.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::ingest::InteractionLog;

/// Unordered node pair stored as `(u, v)` with `u < v`.
pub type Pair = (NodeId, NodeId);

pub const DEFAULT_TRAIN_FRAC: f64 = 0.75;
pub const DEFAULT_REMOVAL_FRAC: f64 = 0.10;
pub const DEFAULT_SKEW_RATIO: usize = 10;
/// Rejection-sampling attempt budget, per target negative.
pub const ATTEMPT_BUDGET_FACTOR: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("future split requires a temporal interaction log")]
    NotTemporal,
    #[error("the {0} portion of the split is empty")]
    EmptyPortion(&'static str),
    #[error("no positive examples survive filtering")]
    NoPositives,
    #[error("edge removal leaves no usable graph")]
    RemovalEmptiesGraph,
    #[error("pair ({0}, {1}) is an edge of the graph; positives must be non-edges")]
    EdgeAsPositive(NodeId, NodeId),
    #[error("negative sampling exhausted at hop {hop}: found {found} of {target} after {attempts} attempts")]
    Exhausted { hop: u8, found: usize, target: usize, attempts: usize },
    #[error("no positives for hop {0}; cell is empty")]
    EmptyCell(u8),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionType {
    Future,
    Missing,
}

impl PredictionType {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictionType::Future => "future",
            PredictionType::Missing => "missing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HopClass {
    Two,
    Three,
}

impl HopClass {
    pub const ALL: [HopClass; 2] = [HopClass::Two, HopClass::Three];

    pub fn distance(self) -> u32 {
        match self {
            HopClass::Two => 2,
            HopClass::Three => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Skew {
    Balanced,
    Imbalanced,
}

impl Skew {
    pub const ALL: [Skew; 2] = [Skew::Balanced, Skew::Imbalanced];

    pub fn as_str(self) -> &'static str {
        match self {
            Skew::Balanced => "bal",
            Skew::Imbalanced => "imb",
        }
    }
}

/// How negatives at a fixed distance are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeStrategy {
    /// Pick a node uniformly, then a partner uniformly among the nodes at
    /// the required distance.
    #[default]
    NodeThenPartner,
    /// Uniform over all unordered pairs at the required distance.
    UniformPairs,
}

/// Canonical undirected pair set of a log: direction ignored, self-pairs
/// dropped, duplicates collapsed, sorted.
pub fn undirected_pair_set(log: &InteractionLog) -> Vec<(String, String)> {
    let mut set = BTreeSet::new();
    for r in &log.records {
        if r.src == r.dst {
            continue;
        }
        let (lo, hi) = if r.src < r.dst { (&r.src, &r.dst) } else { (&r.dst, &r.src) };
        set.insert((lo.clone(), hi.clone()));
    }
    set.into_iter().collect()
}

fn filter_candidates(graph: &Graph, candidates: &BTreeSet<(String, String)>) -> Vec<Pair> {
    let mut positives = Vec::new();
    for (a, b) in candidates {
        let (Some(u), Some(v)) = (graph.node_id(a), graph.node_id(b)) else {
            continue;
        };
        if graph.has_edge(u, v) {
            continue;
        }
        positives.push(if u < v { (u, v) } else { (v, u) });
    }
    positives.sort_unstable();
    positives.dedup();
    positives
}

/// Future-link split: earlier 75% of the interaction stream builds the
/// graph, the rest becomes positive examples.
///
/// Fully deterministic — no randomness is consumed. The stream must be
/// canonicalized (`src <= dst`, no self-records) beforehand.
pub fn future_split(log: &InteractionLog, train_frac: f64) -> Result<(Graph, Vec<Pair>), SplitError> {
    if !log.temporal || log.records.iter().any(|r| r.timestamp.is_none()) {
        return Err(SplitError::NotTemporal);
    }
    let mut records = log.records.clone();
    records.sort_by_key(|r| r.timestamp); // stable: ties keep file order
    let cut = (train_frac * records.len() as f64).ceil() as usize;
    if cut == 0 {
        return Err(SplitError::EmptyPortion("train"));
    }
    if cut >= records.len() {
        return Err(SplitError::EmptyPortion("test"));
    }
    let (train, test) = records.split_at(cut);

    let train_pairs: Vec<(String, String)> =
        train.iter().map(|r| (r.src.clone(), r.dst.clone())).collect();
    let graph = match Graph::from_label_pairs(&train_pairs) {
        Ok(g) => g,
        Err(GraphError::EmptyInput) => return Err(SplitError::EmptyPortion("train")),
        Err(e) => return Err(e.into()),
    };

    let candidates: BTreeSet<(String, String)> =
        test.iter().map(|r| (r.src.clone(), r.dst.clone())).collect();
    let positives = filter_candidates(&graph, &candidates);
    if positives.is_empty() {
        return Err(SplitError::NoPositives);
    }
    Ok((graph, positives))
}

/// Missing-link split: remove a uniform sample of links, rebuild the graph
/// from the remainder, and keep the removed links that survive filtering.
pub fn missing_split(
    pairs: &[(String, String)],
    removal_frac: f64,
    seed: u64,
) -> Result<(Graph, Vec<Pair>), SplitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..pairs.len()).collect();
    indices.shuffle(&mut rng);
    let remove_count = (removal_frac * pairs.len() as f64).floor() as usize;
    let removed: BTreeSet<usize> = indices.into_iter().take(remove_count).collect();

    let kept: Vec<(String, String)> = pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, p)| p.clone())
        .collect();
    let graph = match Graph::from_label_pairs(&kept) {
        Ok(g) => g,
        Err(GraphError::EmptyInput) => return Err(SplitError::RemovalEmptiesGraph),
        Err(e) => return Err(e.into()),
    };

    let candidates: BTreeSet<(String, String)> =
        removed.iter().map(|&i| pairs[i].clone()).collect();
    let positives = filter_candidates(&graph, &candidates);
    if positives.is_empty() {
        return Err(SplitError::NoPositives);
    }
    Ok((graph, positives))
}

/// Positives partitioned by shortest-path distance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HopBuckets {
    pub hop2: Vec<Pair>,
    pub hop3: Vec<Pair>,
    /// Pairs at distance greater than three, dropped from the experiment.
    pub discarded: usize,
}

impl HopBuckets {
    pub fn get(&self, hop: HopClass) -> &[Pair] {
        match hop {
            HopClass::Two => &self.hop2,
            HopClass::Three => &self.hop3,
        }
    }
}

/// Buckets non-edge pairs into the two-hop and three-hop classes; farther
/// pairs are counted and discarded.
pub fn bucket_positives(graph: &Graph, pairs: &[Pair]) -> Result<HopBuckets, SplitError> {
    let mut buckets = HopBuckets::default();
    for &(u, v) in pairs {
        if graph.has_edge(u, v) {
            return Err(SplitError::EdgeAsPositive(u, v));
        }
        match graph.bfs_distance(u, v, 4)? {
            Some(2) => buckets.hop2.push((u, v)),
            Some(3) => buckets.hop3.push((u, v)),
            _ => buckets.discarded += 1,
        }
    }
    Ok(buckets)
}

/// Draws `ratio * |positives|` distinct negatives per hop class, every one
/// at exactly the hop's distance and disjoint from the positives.
pub fn sample_negatives(
    graph: &Graph,
    positives: &HopBuckets,
    ratio: usize,
    seed: u64,
    strategy: NegativeStrategy,
) -> Result<HopBuckets, SplitError> {
    let mut out = HopBuckets::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for hop in HopClass::ALL {
        let pos = positives.get(hop);
        let target = ratio * pos.len();
        let drawn = draw_at_distance(graph, pos, hop, target, strategy, &mut rng)?;
        match hop {
            HopClass::Two => out.hop2 = drawn,
            HopClass::Three => out.hop3 = drawn,
        }
    }
    Ok(out)
}

fn draw_at_distance(
    graph: &Graph,
    positives: &[Pair],
    hop: HopClass,
    target: usize,
    strategy: NegativeStrategy,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Pair>, SplitError> {
    if target == 0 {
        return Ok(Vec::new());
    }
    let d = hop.distance();
    let n = graph.node_count();
    let exclude: BTreeSet<Pair> = positives.iter().copied().collect();
    let mut chosen: BTreeSet<Pair> = BTreeSet::new();
    let mut ordered = Vec::with_capacity(target);
    let budget = ATTEMPT_BUDGET_FACTOR * target;

    // Lazily cached distance-d partner lists.
    let mut partners: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    // For uniform-over-pairs: cumulative partner counts over all nodes.
    let cumulative: Option<Vec<usize>> = match strategy {
        NegativeStrategy::NodeThenPartner => None,
        NegativeStrategy::UniformPairs => {
            let mut acc = 0usize;
            let mut cum = Vec::with_capacity(n);
            for u in 0..n as NodeId {
                let list = graph.nodes_at_distance(u, d)?;
                acc += list.len();
                partners.insert(u, list);
                cum.push(acc);
            }
            Some(cum)
        }
    };

    let mut attempts = 0usize;
    while ordered.len() < target {
        if attempts >= budget {
            return Err(SplitError::Exhausted {
                hop: d as u8,
                found: ordered.len(),
                target,
                attempts,
            });
        }
        attempts += 1;
        let u: NodeId = match &cumulative {
            None => rng.gen_range(0..n) as NodeId,
            Some(cum) => {
                let total = *cum.last().unwrap();
                if total == 0 {
                    return Err(SplitError::Exhausted { hop: d as u8, found: 0, target, attempts });
                }
                let t = rng.gen_range(0..total);
                cum.partition_point(|&c| c <= t) as NodeId
            }
        };
        let list = match partners.entry(u) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(graph.nodes_at_distance(u, d)?),
        };
        if list.is_empty() {
            continue;
        }
        let v = list[rng.gen_range(0..list.len())];
        let pair = if u < v { (u, v) } else { (v, u) };
        if exclude.contains(&pair) || !chosen.insert(pair) {
            continue;
        }
        ordered.push(pair);
    }
    Ok(ordered)
}

/// A fully generated evaluation split for one (dataset, prediction type).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSplit {
    pub graph: Graph,
    pub prediction_type: PredictionType,
    pub seed: u64,
    pub skew_ratio: usize,
    pub positives: HopBuckets,
    pub negatives: HopBuckets,
}

impl EvalSplit {
    /// Buckets positives, samples the negative pools and validates the
    /// whole split.
    pub fn generate(
        graph: Graph,
        positives: Vec<Pair>,
        prediction_type: PredictionType,
        ratio: usize,
        seed: u64,
        strategy: NegativeStrategy,
    ) -> Result<EvalSplit, SplitError> {
        let buckets = bucket_positives(&graph, &positives)?;
        let negatives = sample_negatives(&graph, &buckets, ratio, seed, strategy)?;
        let split = EvalSplit {
            graph,
            prediction_type,
            seed,
            skew_ratio: ratio,
            positives: buckets,
            negatives,
        };
        split.validate()?;
        Ok(split)
    }

    /// Exhaustive disjointness and ratio check.
    pub fn validate(&self) -> Result<(), SplitError> {
        for hop in HopClass::ALL {
            let pos: BTreeSet<Pair> = self.positives.get(hop).iter().copied().collect();
            let neg: BTreeSet<Pair> = self.negatives.get(hop).iter().copied().collect();
            assert_eq!(
                neg.len(),
                self.skew_ratio * pos.len(),
                "negative pool must be exactly ratio * positives"
            );
            for &(u, v) in pos.iter().chain(neg.iter()) {
                if self.graph.has_edge(u, v) {
                    return Err(SplitError::EdgeAsPositive(u, v));
                }
            }
            assert!(pos.is_disjoint(&neg), "positives and negatives overlap");
        }
        Ok(())
    }

    /// Labeled test pairs for one cell. Balanced draws a seeded subsample
    /// of the pool, so it is nested inside the imbalanced view.
    pub fn test_view(&self, hop: HopClass, skew: Skew, seed: u64) -> Result<(Vec<Pair>, Vec<bool>), SplitError> {
        let pos = self.positives.get(hop);
        if pos.is_empty() {
            return Err(SplitError::EmptyCell(hop.distance() as u8));
        }
        let pool = self.negatives.get(hop);
        let negatives: Vec<Pair> = match skew {
            Skew::Imbalanced => pool.to_vec(),
            Skew::Balanced => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut idx: Vec<usize> = (0..pool.len()).collect();
                idx.shuffle(&mut rng);
                let mut take: Vec<usize> = idx.into_iter().take(pos.len()).collect();
                take.sort_unstable();
                take.into_iter().map(|i| pool[i]).collect()
            }
        };
        let mut pairs = pos.to_vec();
        let mut labels = vec![true; pos.len()];
        labels.extend(std::iter::repeat(false).take(negatives.len()));
        pairs.extend(negatives);
        Ok((pairs, labels))
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct LabelBuckets {
    hop2: Vec<(String, String)>,
    hop3: Vec<(String, String)>,
}

/// On-disk form of a split, node ids as original labels.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SplitFile {
    prediction_type: PredictionType,
    seed: u64,
    skew_ratio: usize,
    graph_edges: Vec<(String, String)>,
    positives: LabelBuckets,
    negatives: LabelBuckets,
}

impl EvalSplit {
    pub fn to_json(&self) -> String {
        let relabel = |pairs: &[Pair]| {
            pairs
                .iter()
                .map(|&(u, v)| (self.graph.label(u).to_string(), self.graph.label(v).to_string()))
                .collect::<Vec<_>>()
        };
        let file = SplitFile {
            prediction_type: self.prediction_type,
            seed: self.seed,
            skew_ratio: self.skew_ratio,
            graph_edges: relabel(&self.graph.edges()),
            positives: LabelBuckets { hop2: relabel(&self.positives.hop2), hop3: relabel(&self.positives.hop3) },
            negatives: LabelBuckets { hop2: relabel(&self.negatives.hop2), hop3: relabel(&self.negatives.hop3) },
        };
        serde_json::to_string_pretty(&file).expect("split serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<EvalSplit, serde_json::Error> {
        let file: SplitFile = serde_json::from_str(text)?;
        let graph = Graph::from_label_pairs(&file.graph_edges)
            .expect("split file must contain a non-empty edge list");
        let to_ids = |pairs: &[(String, String)]| {
            pairs
                .iter()
                .map(|(a, b)| {
                    let (u, v) = (graph.node_id(a).unwrap(), graph.node_id(b).unwrap());
                    if u < v {
                        (u, v)
                    } else {
                        (v, u)
                    }
                })
                .collect::<Vec<_>>()
        };
        let positives =
            HopBuckets { hop2: to_ids(&file.positives.hop2), hop3: to_ids(&file.positives.hop3), discarded: 0 };
        let negatives =
            HopBuckets { hop2: to_ids(&file.negatives.hop2), hop3: to_ids(&file.negatives.hop3), discarded: 0 };
        Ok(EvalSplit {
            graph,
            prediction_type: file.prediction_type,
            seed: file.seed,
            skew_ratio: file.skew_ratio,
            positives,
            negatives,
        })
    }
}
