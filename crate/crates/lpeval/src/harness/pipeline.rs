//! Stage orchestration: ingest, split, score, evaluate.
//!
//! Each stage reads the previous stage's persisted artifacts, so the
//! subcommands compose and `run-all` is literally the stages in sequence.
//! Per-cell failures are recorded and the run continues.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::BufReader;

use crate::embed::{
    self, embed_edge, out_of_fold_scores, EmbeddingKind, EmbeddingMatrix, LearningMethod,
    SkipGramConfig, WalkConfig, WalkStrategy,
};
use crate::ingest::{canonicalize_undirected, parse_edge_list, InteractionLog, ParseOptions};
use crate::metrics::evaluate_cell;
use crate::sim::{score_pairs, ScoreSheet, SimilarityMethod, SimilarityParams};
use crate::split::{
    future_split, missing_split, undirected_pair_set, EvalSplit, HopClass, NegativeStrategy, Pair,
    PredictionType, Skew,
};

use super::config::{derive_seed, method_group, DatasetConfig, MethodGroup, RunConfig};
use super::store::{
    sheet_from_csv, sheet_to_csv, CellFailure, CellKey, DatasetMeta, FailureKind, Manifest,
    OutputLayout, ResultStore,
};
use super::HarnessError;

/// Parses a dataset file into its canonical undirected interaction log.
pub fn ingest_dataset(ds: &DatasetConfig) -> Result<InteractionLog, HarnessError> {
    let file = fs::File::open(&ds.path)
        .map_err(|e| HarnessError::Store(format!("{}: {e}", ds.path.display())))?;
    let options = ParseOptions {
        has_timestamps: ds.temporal,
        directed: ds.directed,
        ..ParseOptions::default()
    };
    let log = parse_edge_list(BufReader::new(file), &options)
        .map_err(|e| HarnessError::Stage(format!("ingest {}: {e}", ds.name)))?;
    Ok(canonicalize_undirected(&log))
}

/// Generates one split and persists it.
pub fn stage_split(
    config: &RunConfig,
    layout: &OutputLayout,
    ds: &DatasetConfig,
    ptype: PredictionType,
) -> Result<EvalSplit, HarnessError> {
    let log = ingest_dataset(ds)?;
    let stage = |e: crate::split::SplitError| HarnessError::Stage(format!("split {} {}: {e}", ds.name, ptype.as_str()));
    let (graph, positives) = match ptype {
        PredictionType::Future => future_split(&log, config.train_frac).map_err(stage)?,
        PredictionType::Missing => {
            let pairs = undirected_pair_set(&log);
            let seed = derive_seed(config.seed, &["missing-split", &ds.name]);
            missing_split(&pairs, config.removal_frac, seed).map_err(stage)?
        }
    };
    let seed = derive_seed(config.seed, &["negatives", &ds.name, ptype.as_str()]);
    let split = EvalSplit::generate(
        graph,
        positives,
        ptype,
        config.skew_ratio,
        seed,
        NegativeStrategy::NodeThenPartner,
    )
    .map_err(stage)?;
    let path = layout.split_file(&ds.name, ptype);
    fs::write(&path, split.to_json())
        .map_err(|e| HarnessError::Store(format!("{}: {e}", path.display())))?;
    Ok(split)
}

pub fn load_split(layout: &OutputLayout, dataset: &str, ptype: PredictionType) -> Result<EvalSplit, HarnessError> {
    let path = layout.split_file(dataset, ptype);
    let text = fs::read_to_string(&path)
        .map_err(|e| HarnessError::Store(format!("{}: {e}", path.display())))?;
    EvalSplit::from_json(&text).map_err(|e| HarnessError::Store(format!("{}: {e}", path.display())))
}

fn view_seed(config: &RunConfig, dataset: &str, ptype: PredictionType, hop: HopClass) -> u64 {
    derive_seed(
        config.seed,
        &["view", dataset, ptype.as_str(), &hop.distance().to_string()],
    )
}

/// Hops a method is eligible for: local similarity only applies two-hop.
fn eligible_hops(method: &str) -> &'static [HopClass] {
    match method_group(method) {
        Some(MethodGroup::LocalSim) => &[HopClass::Two],
        _ => &HopClass::ALL,
    }
}

struct EmbeddingSet<'a> {
    config: &'a RunConfig,
    layout: &'a OutputLayout,
    dataset: String,
    ptype: PredictionType,
    trained: HashMap<EmbeddingKind, EmbeddingMatrix>,
}

impl<'a> EmbeddingSet<'a> {
    fn get(&mut self, split: &EvalSplit, kind: EmbeddingKind) -> Result<&EmbeddingMatrix, HarnessError> {
        if !self.trained.contains_key(&kind) {
            let digest = format!(
                "{}-{}-{}-{}",
                self.config.digest(),
                self.dataset,
                self.ptype.as_str(),
                kind.name()
            );
            let cache_path = self.layout.embedding_cache(&self.dataset, self.ptype, kind.name());
            let cached = match fs::File::open(&cache_path) {
                Ok(file) => embed::read_embedding_cache(BufReader::new(file), &split.graph, &digest)
                    .unwrap_or(None),
                Err(_) => None,
            };
            let matrix = match cached {
                Some(m) => m,
                None => {
                    let walk_seed =
                        derive_seed(self.config.seed, &["walks", &self.dataset, self.ptype.as_str(), kind.name()]);
                    let sg_seed = derive_seed(
                        self.config.seed,
                        &["skipgram", &self.dataset, self.ptype.as_str(), kind.name()],
                    );
                    let walk_config = WalkConfig {
                        walks_per_node: self.config.walks.walks_per_node,
                        walk_length: self.config.walks.walk_length,
                        strategy: WalkStrategy::Biased { p: self.config.walks.p, q: self.config.walks.q },
                        seed: walk_seed,
                    };
                    let sg_config = SkipGramConfig {
                        dim: self.config.skipgram.dim,
                        window: self.config.skipgram.window,
                        negatives: self.config.skipgram.negatives,
                        epochs: self.config.skipgram.epochs,
                        seed: sg_seed,
                        ..SkipGramConfig::default()
                    };
                    let (matrix, _) = embed::train_node_embedding(&split.graph, kind, &walk_config, &sg_config)
                        .map_err(|e| HarnessError::Stage(format!("embedding {kind:?}: {e}")))?;
                    let mut buf = Vec::new();
                    embed::write_embedding_cache(&mut buf, &split.graph, &matrix, sg_seed, &digest)
                        .map_err(|e| HarnessError::Store(e.to_string()))?;
                    fs::write(&cache_path, buf)
                        .map_err(|e| HarnessError::Store(format!("{}: {e}", cache_path.display())))?;
                    matrix
                }
            };
            self.trained.insert(kind, matrix);
        }
        Ok(&self.trained[&kind])
    }
}

/// Scores every roster method on every eligible cell of one split,
/// persisting the score sheets. Failures are logged, not fatal.
pub fn stage_score(
    config: &RunConfig,
    layout: &OutputLayout,
    ds: &DatasetConfig,
    ptype: PredictionType,
    split: &EvalSplit,
    failures: &mut Vec<CellFailure>,
) -> Result<(), HarnessError> {
    let sim_params = SimilarityParams {
        katz_beta: config.katz.beta,
        katz_length: config.katz.length,
        ..SimilarityParams::default()
    };
    let mut embeddings = EmbeddingSet {
        config,
        layout,
        dataset: ds.name.clone(),
        ptype,
        trained: HashMap::new(),
    };
    let fail = |hop: HopClass, skews: &[Skew], method: &str, kind: FailureKind, error: String, failures: &mut Vec<CellFailure>| {
        for skew in skews {
            failures.push(CellFailure {
                dataset: ds.name.clone(),
                prediction_type: ptype.as_str().to_string(),
                context: format!("score hop={} skew={} method={}", hop.distance(), skew.as_str(), method),
                error: error.clone(),
                kind,
            });
        }
    };

    // Similarity methods are scored together per hop so the hitting-time
    // family shares its per-target solves.
    let sim_roster: Vec<(String, SimilarityMethod)> = config
        .roster()
        .iter()
        .filter_map(|name| SimilarityMethod::parse(name).map(|m| (name.clone(), m)))
        .collect();
    for hop in HopClass::ALL {
        let applicable: Vec<&(String, SimilarityMethod)> = sim_roster
            .iter()
            .filter(|(name, _)| eligible_hops(name).contains(&hop))
            .collect();
        if applicable.is_empty() {
            continue;
        }
        if split.positives.get(hop).is_empty() {
            for (name, _) in &applicable {
                fail(
                    hop,
                    &Skew::ALL,
                    name,
                    FailureKind::EmptyCell,
                    format!("no positives at hop {}", hop.distance()),
                    failures,
                );
            }
            continue;
        }
        let vseed = view_seed(config, &ds.name, ptype, hop);
        let (pairs, _) = split.test_view(hop, Skew::Imbalanced, vseed).expect("non-empty hop");
        let methods: Vec<SimilarityMethod> = applicable.iter().map(|(_, m)| *m).collect();
        let mut write_sheet = |name: &str, sheet: &crate::sim::ScoreSheet| -> Result<(), HarnessError> {
            let path = layout.sheet_file(&ds.name, ptype, hop, None, name);
            fs::write(&path, sheet_to_csv(&split.graph, sheet))
                .map_err(|e| HarnessError::Store(format!("{}: {e}", path.display())))
        };
        match crate::sim::score_pairs_many(&split.graph, &methods, &sim_params, &pairs) {
            Ok(sheets) => {
                for ((name, _), sheet) in applicable.iter().zip(&sheets) {
                    write_sheet(name, sheet)?;
                }
            }
            // attribute failures per method
            Err(_) => {
                for (name, method) in &applicable {
                    match score_pairs(&split.graph, *method, &sim_params, &pairs) {
                        Ok(sheet) => write_sheet(name, &sheet)?,
                        Err(e) => {
                            fail(hop, &Skew::ALL, name, FailureKind::Error, e.to_string(), failures)
                        }
                    }
                }
            }
        }
    }

    for method in config.roster() {
        let Some(group) = method_group(&method) else { continue };
        for &hop in eligible_hops(&method) {
            if split.positives.get(hop).is_empty() {
                if group == MethodGroup::Learning {
                    fail(
                        hop,
                        &Skew::ALL,
                        &method,
                        FailureKind::EmptyCell,
                        format!("no positives at hop {}", hop.distance()),
                        failures,
                    );
                }
                continue;
            }
            let vseed = view_seed(config, &ds.name, ptype, hop);
            match group {
                MethodGroup::LocalSim | MethodGroup::GlobalSim => {} // scored above
                MethodGroup::Learning => {
                    let descriptor = embed::parse_method_name(&method).expect("validated roster");
                    let LearningMethod { embedding, operator } = descriptor.method.expect("implemented");
                    let matrix = match embeddings.get(split, embedding) {
                        Ok(m) => m.clone(),
                        Err(e) => {
                            fail(hop, &Skew::ALL, &method, FailureKind::Error, e.to_string(), failures);
                            continue;
                        }
                    };
                    for skew in Skew::ALL {
                        let (pairs, labels) = split.test_view(hop, skew, vseed).expect("non-empty hop");
                        let features: Result<Vec<Vec<f64>>, _> = pairs
                            .iter()
                            .map(|&(u, v)| embed_edge(matrix.vector(u), matrix.vector(v), operator))
                            .collect();
                        let cv_seed = derive_seed(
                            config.seed,
                            &[
                                "cv",
                                &ds.name,
                                ptype.as_str(),
                                &method,
                                &hop.distance().to_string(),
                                skew.as_str(),
                            ],
                        );
                        let scored = features.and_then(|f| {
                            out_of_fold_scores(&f, &labels, config.cv_folds, cv_seed)
                        });
                        match scored {
                            Ok(scores) => {
                                let sheet = ScoreSheet { method: method.clone(), pairs: pairs.clone(), scores };
                                let path = layout.sheet_file(&ds.name, ptype, hop, Some(skew), &method);
                                fs::write(&path, sheet_to_csv(&split.graph, &sheet))
                                    .map_err(|e| HarnessError::Store(format!("{}: {e}", path.display())))?;
                            }
                            Err(e) => fail(hop, &[skew], &method, FailureKind::Error, e.to_string(), failures),
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Evaluates every cell of one split from the persisted score sheets.
pub fn stage_evaluate(
    config: &RunConfig,
    layout: &OutputLayout,
    ds: &DatasetConfig,
    ptype: PredictionType,
    split: &EvalSplit,
    store: &mut ResultStore,
) -> Result<(), HarnessError> {
    for method in config.roster() {
        let Some(group) = method_group(&method) else { continue };
        for &hop in eligible_hops(&method) {
            if split.positives.get(hop).is_empty() {
                continue; // already logged at score time
            }
            let vseed = view_seed(config, &ds.name, ptype, hop);
            for skew in Skew::ALL {
                let sheet_skew = match group {
                    MethodGroup::Learning => Some(skew),
                    _ => None,
                };
                let path = layout.sheet_file(&ds.name, ptype, hop, sheet_skew, &method);
                let Ok(text) = fs::read_to_string(&path) else {
                    continue; // scoring failed for this cell; failure already logged
                };
                let sheet = sheet_from_csv(&split.graph, &method, &text)?;
                let by_pair: HashMap<Pair, f64> =
                    sheet.pairs.iter().copied().zip(sheet.scores.iter().copied()).collect();
                let (pairs, labels) = split
                    .test_view(hop, skew, vseed)
                    .map_err(|e| HarnessError::Stage(e.to_string()))?;
                let scores: Option<Vec<f64>> = pairs.iter().map(|p| by_pair.get(p).copied()).collect();
                let Some(scores) = scores else {
                    return Err(HarnessError::Store(format!(
                        "sheet {} does not cover the evaluation view",
                        path.display()
                    )));
                };
                let record = evaluate_cell(&scores, &labels, skew)
                    .map_err(|e| HarnessError::Stage(format!("evaluate {}: {e}", path.display())))?;
                store.insert(
                    CellKey {
                        dataset: ds.name.clone(),
                        prediction_type: ptype,
                        hop,
                        skew,
                        method: method.clone(),
                    },
                    record,
                );
            }
        }
    }
    Ok(())
}

/// The whole protocol over every configured dataset. Persists splits,
/// score sheets, `results.csv` and `manifest.json`.
pub fn run_pipeline(config: &RunConfig) -> Result<ResultStore, HarnessError> {
    config.validate()?;
    let layout = OutputLayout::new(&config.out_dir);
    layout.ensure_dirs()?;

    let mut store = ResultStore {
        roster: config.roster(),
        ..ResultStore::default()
    };
    for ds in &config.datasets {
        store
            .datasets
            .insert(ds.name.clone(), DatasetMeta { directed: ds.directed, temporal: ds.temporal });
    }

    for ds in &config.datasets {
        for ptype in ds.prediction_types() {
            let split = match stage_split(config, &layout, ds, ptype) {
                Ok(split) => split,
                Err(e) => {
                    store.failures.push(CellFailure {
                        dataset: ds.name.clone(),
                        prediction_type: ptype.as_str().to_string(),
                        context: "split".to_string(),
                        error: e.to_string(),
                        kind: FailureKind::Error,
                    });
                    continue;
                }
            };
            stage_score(config, &layout, ds, ptype, &split, &mut store.failures)?;
            stage_evaluate(config, &layout, ds, ptype, &split, &mut store)?;
        }
    }

    persist_store(config, &layout, &store)?;
    Ok(store)
}

pub fn persist_store(config: &RunConfig, layout: &OutputLayout, store: &ResultStore) -> Result<(), HarnessError> {
    let results_path = layout.results_file();
    fs::write(&results_path, store.to_csv())
        .map_err(|e| HarnessError::Store(format!("{}: {e}", results_path.display())))?;
    let manifest = Manifest {
        config_digest: config.digest(),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        roster: store.roster.clone(),
        datasets: store.datasets.clone(),
        deviations: super::store::protocol_deviations(),
        failures: store.failures.clone(),
        cells: store.records.len(),
    };
    let manifest_path = layout.manifest_file();
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).expect("manifest serializes"))
        .map_err(|e| HarnessError::Store(format!("{}: {e}", manifest_path.display())))?;
    Ok(())
}

/// Reloads a persisted run for the comparison and report stages.
pub fn load_store(config: &RunConfig) -> Result<ResultStore, HarnessError> {
    let layout = OutputLayout::new(&config.out_dir);
    let results = fs::read_to_string(layout.results_file())
        .map_err(|e| HarnessError::Store(format!("{}: {e}", layout.results_file().display())))?;
    let mut datasets = BTreeMap::new();
    for ds in &config.datasets {
        datasets.insert(ds.name.clone(), DatasetMeta { directed: ds.directed, temporal: ds.temporal });
    }
    let mut store = ResultStore::from_csv(&results, datasets, config.roster())?;
    if let Ok(text) = fs::read_to_string(layout.manifest_file()) {
        if let Ok(manifest) = serde_json::from_str::<Manifest>(&text) {
            store.failures = manifest.failures;
        }
    }
    Ok(store)
}

/// Expected cell count for one split given the roster, for the cell
/// conservation check: every eligible cell either has a record or an
/// explicitly logged failure.
pub fn eligible_cells(roster: &[String]) -> usize {
    roster
        .iter()
        .filter(|m| method_group(m).is_some())
        .map(|m| eligible_hops(m).len() * Skew::ALL.len())
        .sum()
}
