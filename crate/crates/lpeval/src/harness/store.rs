//! Persistent run results: one metric record per evaluation cell, plus the
//! run manifest and score-sheet files everything is reproducible from.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::metrics::MetricRecord;
use crate::sim::ScoreSheet;
use crate::split::{HopClass, PredictionType, Skew};

use super::HarnessError;

/// Coordinates of one evaluation cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellKey {
    pub dataset: String,
    pub prediction_type: PredictionType,
    pub hop: HopClass,
    pub skew: Skew,
    pub method: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// Structurally empty cell (no positives at this hop); rendered "---".
    EmptyCell,
    /// A stage failed for this cell.
    Error,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CellFailure {
    pub dataset: String,
    pub prediction_type: String,
    pub context: String,
    pub error: String,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub directed: bool,
    pub temporal: bool,
}

/// In-memory result store; the reports are pure views over it.
#[derive(Debug, Default, Clone)]
pub struct ResultStore {
    pub records: BTreeMap<CellKey, MetricRecord>,
    pub failures: Vec<CellFailure>,
    pub datasets: BTreeMap<String, DatasetMeta>,
    pub roster: Vec<String>,
}

impl ResultStore {
    pub fn insert(&mut self, key: CellKey, record: MetricRecord) {
        self.records.insert(key, record);
    }

    pub fn metric(
        &self,
        dataset: &str,
        ptype: PredictionType,
        hop: HopClass,
        skew: Skew,
        method: &str,
    ) -> Option<&MetricRecord> {
        self.records.get(&CellKey {
            dataset: dataset.to_string(),
            prediction_type: ptype,
            hop,
            skew,
            method: method.to_string(),
        })
    }

    pub fn dataset_names(&self) -> Vec<String> {
        self.datasets.keys().cloned().collect()
    }

    /// Methods with a record in the given cell coordinates, store order.
    pub fn methods_in_cell(&self, dataset: &str, ptype: PredictionType, hop: HopClass, skew: Skew) -> Vec<String> {
        self.roster
            .iter()
            .filter(|m| self.metric(dataset, ptype, hop, skew, m).is_some())
            .cloned()
            .collect()
    }

    /// `results.csv`: one row per cell, sorted by key.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "dataset,prediction_type,hop,skew,method,auroc,aupr,pr_at_p,pr_at_p_half,positives,total\n",
        );
        for (key, record) in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                key.dataset,
                key.prediction_type.as_str(),
                key.hop.distance(),
                key.skew.as_str(),
                key.method,
                record.auroc,
                record.aupr,
                record.pr_at_p,
                record.pr_at_p_half,
                record.positives,
                record.total
            )
            .unwrap();
        }
        out
    }

    pub fn from_csv(text: &str, datasets: BTreeMap<String, DatasetMeta>, roster: Vec<String>) -> Result<ResultStore, HarnessError> {
        let mut store = ResultStore { datasets, roster, ..ResultStore::default() };
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 11 {
                return Err(HarnessError::Store(format!("results.csv line {}: bad field count", i + 1)));
            }
            let bad = |what: &str| HarnessError::Store(format!("results.csv line {}: bad {what}", i + 1));
            let key = CellKey {
                dataset: fields[0].to_string(),
                prediction_type: match fields[1] {
                    "future" => PredictionType::Future,
                    "missing" => PredictionType::Missing,
                    _ => return Err(bad("prediction type")),
                },
                hop: match fields[2] {
                    "2" => HopClass::Two,
                    "3" => HopClass::Three,
                    _ => return Err(bad("hop")),
                },
                skew: match fields[3] {
                    "bal" => Skew::Balanced,
                    "imb" => Skew::Imbalanced,
                    _ => return Err(bad("skew")),
                },
                method: fields[4].to_string(),
            };
            let record = MetricRecord {
                auroc: fields[5].parse().map_err(|_| bad("auroc"))?,
                aupr: fields[6].parse().map_err(|_| bad("aupr"))?,
                pr_at_p: fields[7].parse().map_err(|_| bad("pr_at_p"))?,
                pr_at_p_half: fields[8].parse().map_err(|_| bad("pr_at_p_half"))?,
                positives: fields[9].parse().map_err(|_| bad("positives"))?,
                total: fields[10].parse().map_err(|_| bad("total"))?,
                skew: key.skew,
            };
            store.records.insert(key, record);
        }
        Ok(store)
    }
}

/// Run manifest: enough to audit a result set. Deliberately free of
/// wall-clock fields so reruns are byte-identical.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub config_digest: String,
    pub seed: u64,
    pub version: String,
    pub roster: Vec<String>,
    pub datasets: BTreeMap<String, DatasetMeta>,
    pub deviations: Vec<String>,
    pub failures: Vec<CellFailure>,
    pub cells: usize,
}

/// Protocol choices that differ from the cited method descriptions; listed
/// in every manifest.
pub fn protocol_deviations() -> Vec<String> {
    vec![
        "DeepWalk trained with negative sampling instead of hierarchical softmax".to_string(),
        "Katz index truncated at a finite maximum walk length".to_string(),
        "GraphSAGE variants and random-forest classifiers are out of scope".to_string(),
    ]
}

/// File layout under the output directory.
pub struct OutputLayout {
    root: PathBuf,
}

impl OutputLayout {
    pub fn new(root: &Path) -> OutputLayout {
        OutputLayout { root: root.to_path_buf() }
    }

    pub fn split_file(&self, dataset: &str, ptype: PredictionType) -> PathBuf {
        self.root.join("splits").join(format!("{dataset}_{}.json", ptype.as_str()))
    }

    /// Similarity sheets hold the full imbalanced view (the balanced view
    /// is a seeded subset); learning sheets are per skew because the
    /// cross-validated scores differ between views.
    pub fn sheet_file(
        &self,
        dataset: &str,
        ptype: PredictionType,
        hop: HopClass,
        skew: Option<Skew>,
        method: &str,
    ) -> PathBuf {
        let name = match skew {
            None => format!("{dataset}_{}_hop{}_{method}.csv", ptype.as_str(), hop.distance()),
            Some(s) => format!("{dataset}_{}_hop{}_{}_{method}.csv", ptype.as_str(), hop.distance(), s.as_str()),
        };
        self.root.join("scores").join(name)
    }

    pub fn results_file(&self) -> PathBuf {
        self.root.join("results.csv")
    }

    /// Failures recorded by the scoring stage, for staged invocations.
    pub fn failures_file(&self) -> PathBuf {
        self.root.join("failures.json")
    }

    pub fn manifest_file(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.root.join("reports")
    }

    pub fn embedding_cache(&self, dataset: &str, ptype: PredictionType, kind: &str) -> PathBuf {
        self.root.join("embeddings").join(format!("{dataset}_{}_{kind}.txt", ptype.as_str()))
    }

    pub fn ensure_dirs(&self) -> Result<(), HarnessError> {
        for dir in [
            self.root.clone(),
            self.root.join("splits"),
            self.root.join("scores"),
            self.root.join("embeddings"),
            self.reports_dir(),
        ] {
            std::fs::create_dir_all(&dir)
                .map_err(|e| HarnessError::Store(format!("{}: {e}", dir.display())))?;
        }
        Ok(())
    }
}

/// Serializes a score sheet as `u,v,score` rows with original labels.
pub fn sheet_to_csv(graph: &Graph, sheet: &ScoreSheet) -> String {
    let mut out = String::from("u,v,score\n");
    for (&(u, v), score) in sheet.pairs.iter().zip(&sheet.scores) {
        writeln!(out, "{},{},{}", graph.label(u), graph.label(v), score).unwrap();
    }
    out
}

/// Parses a score sheet back into id pairs against the split's graph.
pub fn sheet_from_csv(graph: &Graph, method: &str, text: &str) -> Result<ScoreSheet, HarnessError> {
    let mut pairs = Vec::new();
    let mut scores = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(HarnessError::Store(format!("sheet line {}: bad field count", i + 1)));
        }
        let resolve = |label: &str| {
            graph
                .node_id(label)
                .ok_or_else(|| HarnessError::Store(format!("sheet line {}: unknown node {label:?}", i + 1)))
        };
        let (u, v) = (resolve(fields[0])?, resolve(fields[1])?);
        pairs.push(if u < v { (u, v) } else { (v, u) });
        scores.push(
            fields[2]
                .parse()
                .map_err(|_| HarnessError::Store(format!("sheet line {}: bad score", i + 1)))?,
        );
    }
    Ok(ScoreSheet { method: method.to_string(), pairs, scores })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(auroc: f64, skew: Skew) -> MetricRecord {
        MetricRecord { auroc, aupr: 0.5, pr_at_p: 0.4, pr_at_p_half: 0.3, positives: 10, total: 20, skew }
    }

    #[test]
    fn csv_round_trip_preserves_records() {
        let mut store = ResultStore::default();
        store.roster = vec!["CN".into(), "PA".into()];
        store.datasets.insert("d1".into(), DatasetMeta { directed: true, temporal: true });
        store.insert(
            CellKey {
                dataset: "d1".into(),
                prediction_type: PredictionType::Future,
                hop: HopClass::Two,
                skew: Skew::Balanced,
                method: "CN".into(),
            },
            record(0.75, Skew::Balanced),
        );
        store.insert(
            CellKey {
                dataset: "d1".into(),
                prediction_type: PredictionType::Missing,
                hop: HopClass::Three,
                skew: Skew::Imbalanced,
                method: "PA".into(),
            },
            record(0.6, Skew::Imbalanced),
        );
        let csv = store.to_csv();
        let back = ResultStore::from_csv(&csv, store.datasets.clone(), store.roster.clone()).unwrap();
        assert_eq!(back.records, store.records);
        assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn sheet_round_trip() {
        let g = Graph::from_label_pairs(&[("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
        let sheet = ScoreSheet {
            method: "CN".into(),
            pairs: vec![(0, 2), (1, 3)],
            scores: vec![1.0, 0.25],
        };
        let csv = sheet_to_csv(&g, &sheet);
        let back = sheet_from_csv(&g, "CN", &csv).unwrap();
        assert_eq!(back, sheet);
    }

    #[test]
    fn layout_paths() {
        let layout = OutputLayout::new(Path::new("/tmp/run"));
        assert!(layout
            .sheet_file("d", PredictionType::Future, HopClass::Two, None, "CN")
            .ends_with("scores/d_future_hop2_CN.csv"));
        assert!(layout
            .sheet_file("d", PredictionType::Missing, HopClass::Three, Some(Skew::Balanced), "DW_Avg_LR")
            .ends_with("scores/d_missing_hop3_bal_DW_Avg_LR.csv"));
    }
}
