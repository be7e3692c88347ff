//! The comparison battery over a result store: prediction-type, hop,
//! method-group, network-type and class-imbalance analyses.

use crate::split::{HopClass, PredictionType, Skew};
use crate::stats::{
    kendall_tau, one_way_anova, paired_t_test, stars, tukey_hsd, two_sample_t_test, TestResult,
};

use super::config::{method_group, MethodGroup};
use super::store::ResultStore;

/// One scalar view of a metric record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricAxis {
    Auroc,
    AuprBal,
    AuprImb,
    PrPBal,
    PrPImb,
    PrPHalfBal,
    PrPHalfImb,
}

impl MetricAxis {
    /// The five columns the t-test and tau tables share.
    pub const STANDARD: [MetricAxis; 5] = [
        MetricAxis::Auroc,
        MetricAxis::AuprBal,
        MetricAxis::AuprImb,
        MetricAxis::PrPBal,
        MetricAxis::PrPImb,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MetricAxis::Auroc => "AUROC",
            MetricAxis::AuprBal => "AUPR(bal)",
            MetricAxis::AuprImb => "AUPR(imb)",
            MetricAxis::PrPBal => "Pr@P(bal)",
            MetricAxis::PrPImb => "Pr@P(imb)",
            MetricAxis::PrPHalfBal => "Pr@P/2(bal)",
            MetricAxis::PrPHalfImb => "Pr@P/2(imb)",
        }
    }

    /// AUROC is read from the imbalanced (full) view; the skew-sensitive
    /// axes read the view they name.
    pub fn extract(
        self,
        store: &ResultStore,
        dataset: &str,
        ptype: PredictionType,
        hop: HopClass,
        method: &str,
    ) -> Option<f64> {
        let (skew, pick): (Skew, fn(&crate::metrics::MetricRecord) -> f64) = match self {
            MetricAxis::Auroc => (Skew::Imbalanced, |r| r.auroc),
            MetricAxis::AuprBal => (Skew::Balanced, |r| r.aupr),
            MetricAxis::AuprImb => (Skew::Imbalanced, |r| r.aupr),
            MetricAxis::PrPBal => (Skew::Balanced, |r| r.pr_at_p),
            MetricAxis::PrPImb => (Skew::Imbalanced, |r| r.pr_at_p),
            MetricAxis::PrPHalfBal => (Skew::Balanced, |r| r.pr_at_p_half),
            MetricAxis::PrPHalfImb => (Skew::Imbalanced, |r| r.pr_at_p_half),
        };
        store.metric(dataset, ptype, hop, skew, method).map(pick)
    }
}

/// A table of test outcomes; `None` cells render "---".
#[derive(Debug, Clone, PartialEq)]
pub struct TestTable {
    pub title: String,
    pub group_header: &'static str,
    pub row_header: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<TestRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestRow {
    pub group: String,
    pub label: String,
    pub cells: Vec<Option<TestResult>>,
}

/// A table of Kendall tau values.
#[derive(Debug, Clone, PartialEq)]
pub struct TauTable {
    pub title: String,
    pub group_header: &'static str,
    pub row_header: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<TauRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauRow {
    pub group: String,
    pub label: String,
    pub cells: Vec<Option<f64>>,
}

/// Best method per group cell: name and value.
#[derive(Debug, Clone, PartialEq)]
pub struct BestTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<BestRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestRow {
    pub group: String,
    pub label: String,
    pub cells: Vec<Option<(String, f64)>>,
}

/// Everything `compare` produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub future_vs_missing_t: TestTable,
    pub future_vs_missing_tau: TauTable,
    pub hops_t: TestTable,
    pub hops_tau: TauTable,
    pub groups_anova: TestTable,
    pub groups_tukey: TestTable,
    pub groups_three_hop_t: TestTable,
    pub network_type_t: TestTable,
    pub best_per_group: BestTable,
    pub imbalance_tau: TauTable,
    pub early_retrieval_tau: TauTable,
}

pub fn compare_all(store: &ResultStore) -> ComparisonReport {
    let (future_vs_missing_t, future_vs_missing_tau) = compare_future_vs_missing(store);
    let (hops_t, hops_tau) = compare_hops(store);
    let (groups_anova, groups_tukey, groups_three_hop_t) = compare_groups(store);
    let (network_type_t, best_per_group) = compare_network_type(store);
    let (imbalance_tau, early_retrieval_tau) = compare_imbalance(store);
    ComparisonReport {
        future_vs_missing_t,
        future_vs_missing_tau,
        hops_t,
        hops_tau,
        groups_anova,
        groups_tukey,
        groups_three_hop_t,
        network_type_t,
        best_per_group,
        imbalance_tau,
        early_retrieval_tau,
    }
}

fn hop_group(hop: HopClass) -> &'static str {
    match hop {
        HopClass::Two => "two-hop",
        HopClass::Three => "three-hop",
    }
}

fn ptype_group(ptype: PredictionType) -> &'static str {
    match ptype {
        PredictionType::Future => "future LP",
        PredictionType::Missing => "missing LP",
    }
}

/// Per-method value pairs common to two cells.
fn paired_values(
    store: &ResultStore,
    axis: MetricAxis,
    left: (&str, PredictionType, HopClass),
    right: (&str, PredictionType, HopClass),
) -> (Vec<f64>, Vec<f64>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for method in &store.roster {
        let va = axis.extract(store, left.0, left.1, left.2, method);
        let vb = axis.extract(store, right.0, right.1, right.2, method);
        if let (Some(va), Some(vb)) = (va, vb) {
            a.push(va);
            b.push(vb);
        }
    }
    (a, b)
}

/// Paired t-test plus rank correlation between future and missing results
/// on every network evaluated both ways.
pub fn compare_future_vs_missing(store: &ResultStore) -> (TestTable, TauTable) {
    let columns: Vec<String> = MetricAxis::STANDARD.iter().map(|a| a.label().to_string()).collect();
    let mut t_rows = Vec::new();
    let mut tau_rows = Vec::new();
    for hop in HopClass::ALL {
        for dataset in store.dataset_names() {
            let has_both = store.datasets.get(&dataset).map(|m| m.temporal).unwrap_or(false);
            if !has_both {
                continue;
            }
            let mut t_cells = Vec::new();
            let mut tau_cells = Vec::new();
            for axis in MetricAxis::STANDARD {
                let (future, missing) = paired_values(
                    store,
                    axis,
                    (&dataset, PredictionType::Future, hop),
                    (&dataset, PredictionType::Missing, hop),
                );
                if future.len() < 2 {
                    t_cells.push(None);
                    tau_cells.push(None);
                    continue;
                }
                t_cells.push(paired_t_test(&future, &missing, ("future", "missing")).ok());
                tau_cells.push(kendall_tau(&future, &missing).ok());
            }
            t_rows.push(TestRow { group: hop_group(hop).to_string(), label: dataset.clone(), cells: t_cells });
            tau_rows.push(TauRow { group: hop_group(hop).to_string(), label: dataset, cells: tau_cells });
        }
    }
    (
        TestTable {
            title: "Paired t-test: future LP vs missing LP".to_string(),
            group_header: "hop",
            row_header: "network",
            columns: columns.clone(),
            rows: t_rows,
        },
        TauTable {
            title: "Kendall tau: future LP vs missing LP".to_string(),
            group_header: "hop",
            row_header: "network",
            columns,
            rows: tau_rows,
        },
    )
}

/// Paired t-test plus rank correlation between the two-hop and three-hop
/// cells of every dataset.
pub fn compare_hops(store: &ResultStore) -> (TestTable, TauTable) {
    let columns: Vec<String> = MetricAxis::STANDARD.iter().map(|a| a.label().to_string()).collect();
    let mut t_rows = Vec::new();
    let mut tau_rows = Vec::new();
    for ptype in [PredictionType::Missing, PredictionType::Future] {
        for dataset in store.dataset_names() {
            let mut t_cells = Vec::new();
            let mut tau_cells = Vec::new();
            for axis in MetricAxis::STANDARD {
                let (two, three) = paired_values(
                    store,
                    axis,
                    (&dataset, ptype, HopClass::Two),
                    (&dataset, ptype, HopClass::Three),
                );
                if two.len() < 2 {
                    t_cells.push(None);
                    tau_cells.push(None);
                    continue;
                }
                t_cells.push(paired_t_test(&two, &three, ("2-hop", "3-hop")).ok());
                tau_cells.push(kendall_tau(&two, &three).ok());
            }
            // only list datasets that were evaluated under this prediction type
            let evaluated = HopClass::ALL.iter().any(|&h| {
                !store.methods_in_cell(&dataset, ptype, h, Skew::Imbalanced).is_empty()
            });
            if !evaluated {
                continue;
            }
            t_rows.push(TestRow { group: ptype_group(ptype).to_string(), label: dataset.clone(), cells: t_cells });
            tau_rows.push(TauRow { group: ptype_group(ptype).to_string(), label: dataset, cells: tau_cells });
        }
    }
    (
        TestTable {
            title: "Paired t-test: two-hop vs three-hop".to_string(),
            group_header: "prediction type",
            row_header: "dataset",
            columns: columns.clone(),
            rows: t_rows,
        },
        TauTable {
            title: "Kendall tau: two-hop vs three-hop".to_string(),
            group_header: "prediction type",
            row_header: "dataset",
            columns,
            rows: tau_rows,
        },
    )
}

/// Values of every method in one group for one cell and axis.
fn group_values(
    store: &ResultStore,
    dataset: &str,
    ptype: PredictionType,
    hop: HopClass,
    axis: MetricAxis,
    group: MethodGroup,
) -> Vec<f64> {
    store
        .roster
        .iter()
        .filter(|m| method_group(m) == Some(group))
        .filter_map(|m| axis.extract(store, dataset, ptype, hop, m))
        .collect()
}

/// Two-hop: one-way ANOVA plus Tukey HSD over the three method groups.
/// Three-hop: Student's t-test between global-sim and learning.
pub fn compare_groups(store: &ResultStore) -> (TestTable, TestTable, TestTable) {
    let columns: Vec<String> = MetricAxis::STANDARD.iter().map(|a| a.label().to_string()).collect();
    let mut anova_rows = Vec::new();
    let mut tukey_rows = Vec::new();
    let mut three_hop_rows = Vec::new();
    let group_labels = ["local-sim", "global-sim", "learning"];

    for ptype in [PredictionType::Missing, PredictionType::Future] {
        for dataset in store.dataset_names() {
            // two-hop ANOVA and Tukey
            let groups: Vec<Vec<f64>> = [MethodGroup::LocalSim, MethodGroup::GlobalSim, MethodGroup::Learning]
                .iter()
                .map(|&g| group_values(store, &dataset, ptype, HopClass::Two, MetricAxis::Auroc, g))
                .collect();
            if groups.iter().all(|g| g.len() >= 2) {
                let mut anova_cells = Vec::new();
                let mut tukey_cells: Vec<Vec<Option<TestResult>>> = vec![Vec::new(); 3];
                for axis in MetricAxis::STANDARD {
                    let groups: Vec<Vec<f64>> =
                        [MethodGroup::LocalSim, MethodGroup::GlobalSim, MethodGroup::Learning]
                            .iter()
                            .map(|&g| group_values(store, &dataset, ptype, HopClass::Two, axis, g))
                            .collect();
                    match one_way_anova(&groups) {
                        Ok(anova) => anova_cells.push(Some(TestResult {
                            statistic: anova.f_statistic,
                            p_value: anova.p_value,
                            winner: None,
                            stars: stars(anova.p_value),
                        })),
                        Err(_) => anova_cells.push(None),
                    }
                    match tukey_hsd(&groups, &group_labels) {
                        Ok(comparisons) => {
                            // display order: learning vs global-sim, global-sim vs
                            // local-sim, learning vs local-sim
                            for (slot, (l, r)) in [(1usize, 2usize), (0, 1), (0, 2)].iter().enumerate() {
                                let found = comparisons
                                    .iter()
                                    .find(|c| c.left == *l && c.right == *r)
                                    .map(|c| c.result.clone());
                                tukey_cells[slot].push(found);
                            }
                        }
                        Err(_) => {
                            for cells in tukey_cells.iter_mut() {
                                cells.push(None);
                            }
                        }
                    }
                }
                anova_rows.push(TestRow {
                    group: ptype_group(ptype).to_string(),
                    label: dataset.clone(),
                    cells: anova_cells,
                });
                for (slot, label) in [
                    "learning vs global-sim",
                    "global-sim vs local-sim",
                    "learning vs local-sim",
                ]
                .iter()
                .enumerate()
                {
                    tukey_rows.push(TestRow {
                        group: format!("{} / {}", ptype_group(ptype), dataset),
                        label: label.to_string(),
                        cells: tukey_cells[slot].clone(),
                    });
                }
            }

            // three-hop global-sim vs learning
            let global = group_values(store, &dataset, ptype, HopClass::Three, MetricAxis::Auroc, MethodGroup::GlobalSim);
            let learning = group_values(store, &dataset, ptype, HopClass::Three, MetricAxis::Auroc, MethodGroup::Learning);
            if global.len() >= 2 && learning.len() >= 2 {
                let cells = MetricAxis::STANDARD
                    .iter()
                    .map(|&axis| {
                        let g = group_values(store, &dataset, ptype, HopClass::Three, axis, MethodGroup::GlobalSim);
                        let l = group_values(store, &dataset, ptype, HopClass::Three, axis, MethodGroup::Learning);
                        if g.len() < 2 || l.len() < 2 {
                            return None;
                        }
                        two_sample_t_test(&g, &l, ("global-sim", "learning")).ok()
                    })
                    .collect();
                three_hop_rows.push(TestRow {
                    group: ptype_group(ptype).to_string(),
                    label: dataset.clone(),
                    cells,
                });
            }
        }
    }
    (
        TestTable {
            title: "One-way ANOVA over method groups (two-hop)".to_string(),
            group_header: "prediction type",
            row_header: "dataset",
            columns: columns.clone(),
            rows: anova_rows,
        },
        TestTable {
            title: "Tukey HSD over method groups (two-hop)".to_string(),
            group_header: "dataset",
            row_header: "method group pair",
            columns: columns.clone(),
            rows: tukey_rows,
        },
        TestTable {
            title: "Student's t-test: global-sim vs learning (three-hop)".to_string(),
            group_header: "prediction type",
            row_header: "dataset",
            columns,
            rows: three_hop_rows,
        },
    )
}

/// Best axis value over one group's methods in one cell.
fn best_in_group(
    store: &ResultStore,
    dataset: &str,
    ptype: PredictionType,
    hop: HopClass,
    axis: MetricAxis,
    group: MethodGroup,
) -> Option<(String, f64)> {
    let mut best: Option<(String, f64)> = None;
    for method in &store.roster {
        if method_group(method) != Some(group) {
            continue;
        }
        if let Some(v) = axis.extract(store, dataset, ptype, hop, method) {
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((method.clone(), v));
            }
        }
    }
    best
}

/// Directed vs undirected networks, comparing each group's best scores;
/// also emits the best-per-group table itself.
pub fn compare_network_type(store: &ResultStore) -> (TestTable, BestTable) {
    let columns: Vec<String> = MetricAxis::STANDARD.iter().map(|a| a.label().to_string()).collect();
    let mut t_rows = Vec::new();
    let mut best_rows = Vec::new();
    let settings = [
        (PredictionType::Future, HopClass::Two, "future two-hop"),
        (PredictionType::Missing, HopClass::Two, "missing two-hop"),
        (PredictionType::Future, HopClass::Three, "future three-hop"),
        (PredictionType::Missing, HopClass::Three, "missing three-hop"),
    ];
    for (ptype, hop, setting) in settings {
        let groups: &[MethodGroup] = if hop == HopClass::Two {
            &[MethodGroup::LocalSim, MethodGroup::GlobalSim, MethodGroup::Learning]
        } else {
            &[MethodGroup::GlobalSim, MethodGroup::Learning]
        };
        for &group in groups {
            let mut cells = Vec::new();
            for axis in MetricAxis::STANDARD {
                let mut directed = Vec::new();
                let mut undirected = Vec::new();
                for (dataset, meta) in &store.datasets {
                    if let Some((_, v)) = best_in_group(store, dataset, ptype, hop, axis, group) {
                        if meta.directed {
                            directed.push(v);
                        } else {
                            undirected.push(v);
                        }
                    }
                }
                if directed.len() < 2 || undirected.len() < 2 {
                    cells.push(None);
                    continue;
                }
                cells.push(two_sample_t_test(&directed, &undirected, ("directed", "undirected")).ok());
            }
            t_rows.push(TestRow {
                group: setting.to_string(),
                label: group.as_str().to_string(),
                cells,
            });
        }
        // Appendix-style best-per-group rows
        for dataset in store.dataset_names() {
            for &group in groups {
                let cells: Vec<Option<(String, f64)>> = MetricAxis::STANDARD
                    .iter()
                    .map(|&axis| best_in_group(store, &dataset, ptype, hop, axis, group))
                    .collect();
                if cells.iter().any(Option::is_some) {
                    best_rows.push(BestRow {
                        group: format!("{setting} / {dataset}"),
                        label: group.as_str().to_string(),
                        cells,
                    });
                }
            }
        }
    }
    (
        TestTable {
            title: "Student's t-test: directed vs undirected networks (best per group)".to_string(),
            group_header: "setting",
            row_header: "method type",
            columns: columns.clone(),
            rows: t_rows,
        },
        BestTable {
            title: "Best performing method per group".to_string(),
            columns,
            rows: best_rows,
        },
    )
}

/// Rank-correlation analyses of class imbalance (overall and early
/// retrieval): tau between metric pairs across methods.
pub fn compare_imbalance(store: &ResultStore) -> (TauTable, TauTable) {
    let imbalance_pairs = [
        (MetricAxis::Auroc, MetricAxis::AuprBal),
        (MetricAxis::Auroc, MetricAxis::AuprImb),
        (MetricAxis::AuprBal, MetricAxis::AuprImb),
        (MetricAxis::PrPBal, MetricAxis::PrPImb),
    ];
    let early_pairs = [
        (MetricAxis::Auroc, MetricAxis::PrPHalfBal),
        (MetricAxis::Auroc, MetricAxis::PrPHalfImb),
        (MetricAxis::PrPHalfBal, MetricAxis::PrPHalfImb),
    ];
    let table = |pairs: &[(MetricAxis, MetricAxis)], title: &str| {
        let mut columns = Vec::new();
        for hop in HopClass::ALL {
            for (a, b) in pairs {
                columns.push(format!("{} {} vs {}", hop_group(hop), a.label(), b.label()));
            }
        }
        let mut rows = Vec::new();
        for ptype in [PredictionType::Missing, PredictionType::Future] {
            for dataset in store.dataset_names() {
                let mut cells = Vec::new();
                let mut any = false;
                for hop in HopClass::ALL {
                    for &(a, b) in pairs {
                        let mut va = Vec::new();
                        let mut vb = Vec::new();
                        for method in &store.roster {
                            let x = a.extract(store, &dataset, ptype, hop, method);
                            let y = b.extract(store, &dataset, ptype, hop, method);
                            if let (Some(x), Some(y)) = (x, y) {
                                va.push(x);
                                vb.push(y);
                            }
                        }
                        if va.len() < 2 {
                            cells.push(None);
                        } else {
                            any = true;
                            cells.push(kendall_tau(&va, &vb).ok());
                        }
                    }
                }
                if any {
                    rows.push(TauRow { group: ptype_group(ptype).to_string(), label: dataset.clone(), cells });
                }
            }
        }
        TauTable {
            title: title.to_string(),
            group_header: "prediction type",
            row_header: "dataset",
            columns,
            rows,
        }
    };
    (
        table(&imbalance_pairs, "Kendall tau between evaluation measures (class imbalance)"),
        table(&early_pairs, "Kendall tau between evaluation measures (early retrieval)"),
    )
}
