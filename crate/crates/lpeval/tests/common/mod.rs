//! Shared fixtures for the integration and acceptance suites.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lpeval::graph::{Graph, NodeId};
use lpeval::harness::config::{DatasetConfig, KatzConfig, RunConfig, SkipGramSettings, WalkSettings};

pub fn gnp_pairs(n: usize, p: f64, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p {
                pairs.push((format!("n{i:03}"), format!("n{j:03}")));
            }
        }
    }
    pairs
}

/// Ring lattice with `k` neighbors each side plus a few random chords.
pub fn small_world_pairs(n: usize, k: usize, chords: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for i in 0..n {
        for d in 1..=k {
            let j = (i + d) % n;
            pairs.push((format!("n{i:03}"), format!("n{j:03}")));
        }
    }
    for _ in 0..chords {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            pairs.push((format!("n{i:03}"), format!("n{j:03}")));
        }
    }
    pairs
}

/// Preferential-attachment-style growth: each new node attaches to `m`
/// endpoints sampled from the current edge-endpoint multiset.
pub fn preferential_pairs(n: usize, m: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = vec![(0, 1)];
    let mut endpoints: Vec<usize> = vec![0, 1];
    for v in 2..n {
        for _ in 0..m {
            let target = endpoints[rng.gen_range(0..endpoints.len())];
            if target != v {
                pairs.push((v, target));
                endpoints.push(v);
                endpoints.push(target);
            }
        }
    }
    pairs
        .into_iter()
        .map(|(a, b)| (format!("n{a:03}"), format!("n{b:03}")))
        .collect()
}

/// Writes a shuffled timestamped interaction file (with some repeated
/// interactions) for a G(n, p) graph; returns its path.
pub fn write_temporal_dataset(dir: &Path, name: &str, n: usize, p: f64, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    for (a, b) in gnp_pairs(n, p, seed ^ 0x5eed) {
        let reps = 1 + rng.gen_range(0..3);
        for _ in 0..reps {
            let t: u64 = rng.gen_range(1..100_000);
            if rng.gen::<bool>() {
                lines.push(format!("{a} {b} {t}"));
            } else {
                lines.push(format!("{b} {a} {t}"));
            }
        }
    }
    lines.shuffle(&mut rng);
    let path = dir.join(format!("{name}.txt"));
    std::fs::write(&path, format!("# synthetic temporal network\n{}\n", lines.join("\n"))).unwrap();
    path
}

/// A small, fast configuration over one synthetic temporal dataset.
pub fn synthetic_config(out_dir: &Path, data_path: &Path, seed: u64) -> RunConfig {
    RunConfig {
        datasets: vec![DatasetConfig {
            name: "synth".to_string(),
            path: data_path.to_path_buf(),
            temporal: true,
            directed: true,
            prediction_types: None,
        }],
        methods: None,
        seed,
        out_dir: out_dir.to_path_buf(),
        train_frac: 0.75,
        removal_frac: 0.1,
        skew_ratio: 10,
        cv_folds: 5,
        katz: KatzConfig::default(),
        walks: WalkSettings { walks_per_node: 4, walk_length: 20, p: 1.0, q: 1.0 },
        skipgram: SkipGramSettings { dim: 16, window: 4, negatives: 3, epochs: 2 },
    }
}

/// All-pairs shortest paths; `usize::MAX / 4` marks unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for &v in g.neighbors(u as NodeId).unwrap() {
            d[u][v as usize] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}
