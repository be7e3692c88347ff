//! Prototype calibration for the planted-partition learning check.
//! (Temporary scaffolding; superseded by the acceptance suite.)

mod common;

use lpeval::embed::{
    embed_edge, out_of_fold_scores, train_node_embedding, EdgeOperator, EmbeddingKind,
    SkipGramConfig, WalkConfig,
};
use lpeval::graph::Graph;
use lpeval::metrics::auroc;
use lpeval::split::{bucket_positives, sample_negatives, HopBuckets, NegativeStrategy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn planted_auroc(seed: u64, walks: usize, len: usize, window: usize, dim: usize, epochs: usize, held_n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // two G(30, 0.5) blocks
    let mut edges: Vec<(String, String)> = Vec::new();
    for block in 0..2u32 {
        for i in 0..30u32 {
            for j in (i + 1)..30 {
                if rng.gen::<f64>() < 0.5 {
                    edges.push((format!("b{block}n{i:02}"), format!("b{block}n{j:02}")));
                }
            }
        }
    }
    // 4 cross edges
    for k in 0..4u32 {
        edges.push((format!("b0n{:02}", k * 7), format!("b1n{:02}", k * 7 + 1)));
    }
    // hold out intra-block edges
    let mut intra_idx: Vec<usize> = (0..edges.len() - 4).collect();
    intra_idx.shuffle(&mut rng);
    let held: Vec<usize> = intra_idx.into_iter().take(held_n).collect();
    let kept: Vec<(String, String)> = edges
        .iter()
        .enumerate()
        .filter(|(i, _)| !held.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    let graph = Graph::from_label_pairs(&kept).unwrap();
    let positives: Vec<(u32, u32)> = held
        .iter()
        .filter_map(|&i| {
            let (a, b) = &edges[i];
            let (u, v) = (graph.node_id(a)?, graph.node_id(b)?);
            if graph.has_edge(u, v) {
                return None;
            }
            Some(if u < v { (u, v) } else { (v, u) })
        })
        .collect();
    let buckets = bucket_positives(&graph, &positives).unwrap();
    let negatives = sample_negatives(&graph, &buckets, 1, seed ^ 0xabc, NegativeStrategy::NodeThenPartner).unwrap();

    let wc = WalkConfig { walks_per_node: walks, walk_length: len, seed: seed ^ 0x11, ..WalkConfig::default() };
    let sg = SkipGramConfig { dim, window, negatives: 5, epochs, seed: seed ^ 0x22, ..SkipGramConfig::default() };
    let (emb, _) = train_node_embedding(&graph, EmbeddingKind::DeepWalk, &wc, &sg).unwrap();

    let assemble = |buckets: &HopBuckets| -> Vec<(u32, u32)> {
        buckets.hop2.iter().chain(buckets.hop3.iter()).copied().collect()
    };
    let pos = assemble(&buckets);
    let neg = assemble(&negatives);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for &(u, v) in pos.iter().chain(neg.iter()) {
        features.push(embed_edge(emb.vector(u), emb.vector(v), EdgeOperator::Hadamard).unwrap());
        labels.push(features.len() <= pos.len());
    }
    let scores = out_of_fold_scores(&features, &labels, 5, seed ^ 0x33).unwrap();
    auroc(&scores, &labels).unwrap()
}

#[test]
#[ignore]
fn calibrate() {
    for (walks, len, window, dim, epochs, held) in [
        (50usize, 20usize, 2usize, 16usize, 5usize, 60usize),
        (100, 20, 2, 16, 5, 60),
        (50, 20, 3, 32, 10, 60),
        (100, 40, 2, 16, 10, 60),
    ] {
        let mut aurocs = Vec::new();
        for seed in 0..10 {
            aurocs.push(planted_auroc(1000 + seed, walks, len, window, dim, epochs, held));
        }
        let pass = aurocs.iter().filter(|&&a| a >= 0.8).count();
        println!("walks={walks} len={len} w={window} d={dim} ep={epochs} held={held}: pass {pass}/10, aurocs {aurocs:.3?}");
    }
}
