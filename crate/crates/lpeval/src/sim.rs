//! Similarity-based link scorers: the four local neighborhood indices and
//! the six global ones (preferential attachment, truncated Katz, and the
//! hitting/commute-time family).
//!
//! Every scorer returns "higher = more likely link"; the hitting-time
//! family is negated here once so downstream ranking never special-cases
//! direction.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::split::Pair;

pub const DEFAULT_KATZ_BETA: f64 = 0.05;
pub const DEFAULT_KATZ_LENGTH: usize = 6;
pub const DEFAULT_SOLVER_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 1_000_000;
/// Dense direct solves below this size; Gauss–Seidel above.
const DENSE_SOLVE_LIMIT: usize = 2000;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("scorers are defined on distinct nodes, got ({0}, {0})")]
    SamePair(NodeId),
    #[error("pair ({0}, {1}) is an edge; scorers apply to non-edges")]
    PairIsEdge(NodeId, NodeId),
    #[error("local method {method} applied to a pair at distance > 2")]
    LocalMethodBeyondTwoHop { method: &'static str, pair: Pair },
    #[error("hitting-time solve for target {0} did not converge within {MAX_SWEEPS} sweeps")]
    NoConvergence(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodFamily {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimilarityMethod {
    CommonNeighbors,
    Jaccard,
    AdamicAdar,
    ResourceAllocation,
    PreferentialAttachment,
    Katz,
    HittingTime,
    NormHittingTime,
    CommuteTime,
    NormCommuteTime,
}

impl SimilarityMethod {
    pub const ALL: [SimilarityMethod; 10] = [
        SimilarityMethod::CommonNeighbors,
        SimilarityMethod::Jaccard,
        SimilarityMethod::AdamicAdar,
        SimilarityMethod::ResourceAllocation,
        SimilarityMethod::PreferentialAttachment,
        SimilarityMethod::Katz,
        SimilarityMethod::HittingTime,
        SimilarityMethod::NormHittingTime,
        SimilarityMethod::CommuteTime,
        SimilarityMethod::NormCommuteTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityMethod::CommonNeighbors => "CN",
            SimilarityMethod::Jaccard => "JC",
            SimilarityMethod::AdamicAdar => "AA",
            SimilarityMethod::ResourceAllocation => "RA",
            SimilarityMethod::PreferentialAttachment => "PA",
            SimilarityMethod::Katz => "Katz",
            SimilarityMethod::HittingTime => "HT",
            SimilarityMethod::NormHittingTime => "Norm-HT",
            SimilarityMethod::CommuteTime => "CT",
            SimilarityMethod::NormCommuteTime => "Norm-CT",
        }
    }

    pub fn parse(name: &str) -> Option<SimilarityMethod> {
        SimilarityMethod::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn family(self) -> MethodFamily {
        match self {
            SimilarityMethod::CommonNeighbors
            | SimilarityMethod::Jaccard
            | SimilarityMethod::AdamicAdar
            | SimilarityMethod::ResourceAllocation => MethodFamily::Local,
            _ => MethodFamily::Global,
        }
    }
}

/// Knobs for the parametric scorers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityParams {
    pub katz_beta: f64,
    pub katz_length: usize,
    pub solver_tol: f64,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        SimilarityParams {
            katz_beta: DEFAULT_KATZ_BETA,
            katz_length: DEFAULT_KATZ_LENGTH,
            solver_tol: DEFAULT_SOLVER_TOL,
        }
    }
}

fn check_pair(g: &Graph, u: NodeId, v: NodeId) -> Result<(), SimError> {
    if u == v {
        return Err(SimError::SamePair(u));
    }
    g.neighbors(u)?;
    g.neighbors(v)?;
    Ok(())
}

fn common_neighbors(g: &Graph, u: NodeId, v: NodeId) -> Vec<NodeId> {
    let (a, b) = (g.neighbors(u).unwrap(), g.neighbors(v).unwrap());
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn score_cn(g: &Graph, u: NodeId, v: NodeId) -> Result<usize, SimError> {
    check_pair(g, u, v)?;
    Ok(common_neighbors(g, u, v).len())
}

pub fn score_jc(g: &Graph, u: NodeId, v: NodeId) -> Result<f64, SimError> {
    check_pair(g, u, v)?;
    let inter = common_neighbors(g, u, v).len();
    let union = g.degree(u)? + g.degree(v)? - inter;
    if union == 0 {
        return Ok(0.0); // unreachable in a connected LCC, but defined
    }
    Ok(inter as f64 / union as f64)
}

pub fn score_aa(g: &Graph, u: NodeId, v: NodeId) -> Result<f64, SimError> {
    check_pair(g, u, v)?;
    Ok(common_neighbors(g, u, v)
        .iter()
        .map(|&z| 1.0 / (g.degree(z).unwrap() as f64).ln())
        .sum())
}

pub fn score_ra(g: &Graph, u: NodeId, v: NodeId) -> Result<f64, SimError> {
    check_pair(g, u, v)?;
    Ok(common_neighbors(g, u, v)
        .iter()
        .map(|&z| 1.0 / g.degree(z).unwrap() as f64)
        .sum())
}

pub fn score_pa(g: &Graph, u: NodeId, v: NodeId) -> Result<usize, SimError> {
    check_pair(g, u, v)?;
    Ok(g.degree(u)? * g.degree(v)?)
}

/// Truncated Katz index: sum over walk lengths `1..=length` of
/// `beta^l * (#walks of length l between u and v)`, by repeated sparse
/// matrix–vector products seeded at `u`.
pub fn score_katz(g: &Graph, u: NodeId, v: NodeId, beta: f64, length: usize) -> Result<f64, SimError> {
    check_pair(g, u, v)?;
    Ok(katz_row(g, u, beta, length)[v as usize])
}

/// Katz scores from `u` to every node, one sparse power iteration.
fn katz_row(g: &Graph, u: NodeId, beta: f64, length: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut walks = vec![0.0f64; n];
    walks[u as usize] = 1.0;
    let mut scores = vec![0.0f64; n];
    let mut weight = 1.0;
    for _ in 0..length {
        weight *= beta;
        let mut next = vec![0.0f64; n];
        for (x, &w) in walks.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for &y in g.neighbors(x as NodeId).unwrap() {
                next[y as usize] += w;
            }
        }
        for (s, &w) in scores.iter_mut().zip(next.iter()) {
            *s += weight * w;
        }
        walks = next;
    }
    scores
}

/// Expected steps for a random walker to first reach `target` from every
/// source. Dense direct solve at small scale, Gauss–Seidel above it.
pub fn hitting_time(g: &Graph, target: NodeId, tol: f64) -> Result<Vec<f64>, SimError> {
    g.neighbors(target)?;
    if g.node_count() <= DENSE_SOLVE_LIMIT {
        Ok(hitting_time_dense(g, target))
    } else {
        hitting_time_gauss_seidel(g, target, tol)
    }
}

/// Gauss–Seidel on `h(x) = 1 + mean_{z in N(x)} h(z)`, `h(target) = 0`,
/// sweeping in breadth-first order from the target.
pub fn hitting_time_gauss_seidel(g: &Graph, target: NodeId, tol: f64) -> Result<Vec<f64>, SimError> {
    g.neighbors(target)?;
    let n = g.node_count();
    let mut order: Vec<NodeId> = Vec::with_capacity(n - 1);
    {
        let mut seen = vec![false; n];
        seen[target as usize] = true;
        let mut frontier = vec![target];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in g.neighbors(x).unwrap() {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        order.push(y);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
    }
    let mut h = vec![0.0f64; n];
    for _ in 0..MAX_SWEEPS {
        for &x in &order {
            let sum: f64 = g.neighbors(x).unwrap().iter().map(|&z| h[z as usize]).sum();
            h[x as usize] = 1.0 + sum / g.degree(x).unwrap() as f64;
        }
        let mut residual = 0.0f64;
        for &x in &order {
            let sum: f64 = g.neighbors(x).unwrap().iter().map(|&z| h[z as usize]).sum();
            let r = (h[x as usize] - 1.0 - sum / g.degree(x).unwrap() as f64).abs();
            residual = residual.max(r);
        }
        if residual < tol {
            return Ok(h);
        }
    }
    Err(SimError::NoConvergence(target))
}

/// Direct solve of the hitting-time linear system by Gaussian elimination
/// with partial pivoting.
pub fn hitting_time_dense(g: &Graph, target: NodeId) -> Vec<f64> {
    let n = g.node_count();
    let unknowns: Vec<NodeId> = (0..n as NodeId).filter(|&x| x != target).collect();
    let index: BTreeMap<NodeId, usize> = unknowns.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let m = unknowns.len();
    // rows of [A | b] for A h = b
    let mut a = vec![vec![0.0f64; m + 1]; m];
    for (i, &x) in unknowns.iter().enumerate() {
        a[i][i] = 1.0;
        a[i][m] = 1.0;
        let inv_deg = 1.0 / g.degree(x).unwrap() as f64;
        for &z in g.neighbors(x).unwrap() {
            if let Some(&j) = index.get(&z) {
                a[i][j] -= inv_deg;
            }
        }
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        for row in (col + 1)..m {
            let factor = a[row][col] / p;
            if factor == 0.0 {
                continue;
            }
            // split_at_mut so the pivot row can be read while updating
            let (top, bottom) = a.split_at_mut(row);
            let (pivot_row, this_row) = (&top[col], &mut bottom[0]);
            for k in col..=m {
                this_row[k] -= factor * pivot_row[k];
            }
        }
    }
    let mut x = vec![0.0f64; m];
    for row in (0..m).rev() {
        let mut acc = a[row][m];
        for k in (row + 1)..m {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    let mut h = vec![0.0f64; n];
    for (i, &node) in unknowns.iter().enumerate() {
        h[node as usize] = x[i];
    }
    h
}

pub fn score_ht(g: &Graph, u: NodeId, v: NodeId, tol: f64) -> Result<f64, SimError> {
    check_pair(g, u, v)?;
    Ok(-hitting_time(g, v, tol)?[u as usize])
}

pub fn score_norm_ht(g: &Graph, u: NodeId, v: NodeId, tol: f64) -> Result<f64, SimError> {
    check_pair(g, u, v)?;
    Ok(-hitting_time(g, v, tol)?[u as usize] * g.stationary_probability(v)?)
}

pub fn score_ct(g: &Graph, u: NodeId, v: NodeId, tol: f64) -> Result<f64, SimError> {
    check_pair(g, u, v)?;
    Ok(-(hitting_time(g, v, tol)?[u as usize] + hitting_time(g, u, tol)?[v as usize]))
}

pub fn score_norm_ct(g: &Graph, u: NodeId, v: NodeId, tol: f64) -> Result<f64, SimError> {
    check_pair(g, u, v)?;
    let huv = hitting_time(g, v, tol)?[u as usize];
    let hvu = hitting_time(g, u, tol)?[v as usize];
    Ok(-(huv * g.stationary_probability(v)? + hvu * g.stationary_probability(u)?))
}

/// Per-method scored pairs for one evaluation cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSheet {
    pub method: String,
    pub pairs: Vec<Pair>,
    pub scores: Vec<f64>,
}

/// Scores every pair with one method. Hitting-time solves are computed
/// once per distinct target node (in parallel) and reused across the
/// batch; Katz rows are likewise cached per source.
pub fn score_pairs(
    g: &Graph,
    method: SimilarityMethod,
    params: &SimilarityParams,
    pairs: &[Pair],
) -> Result<ScoreSheet, SimError> {
    for &(u, v) in pairs {
        check_pair(g, u, v)?;
        if g.has_edge(u, v) {
            return Err(SimError::PairIsEdge(u, v));
        }
    }
    let scores: Vec<f64> = match method {
        SimilarityMethod::CommonNeighbors
        | SimilarityMethod::Jaccard
        | SimilarityMethod::AdamicAdar
        | SimilarityMethod::ResourceAllocation => {
            let mut out = Vec::with_capacity(pairs.len());
            for &(u, v) in pairs {
                if common_neighbors(g, u, v).is_empty() {
                    return Err(SimError::LocalMethodBeyondTwoHop { method: method.name(), pair: (u, v) });
                }
                out.push(match method {
                    SimilarityMethod::CommonNeighbors => score_cn(g, u, v)? as f64,
                    SimilarityMethod::Jaccard => score_jc(g, u, v)?,
                    SimilarityMethod::AdamicAdar => score_aa(g, u, v)?,
                    _ => score_ra(g, u, v)?,
                });
            }
            out
        }
        SimilarityMethod::PreferentialAttachment => pairs
            .iter()
            .map(|&(u, v)| score_pa(g, u, v).map(|s| s as f64))
            .collect::<Result<_, _>>()?,
        SimilarityMethod::Katz => {
            let mut sources: Vec<NodeId> = pairs.iter().map(|&(u, _)| u).collect();
            sources.sort_unstable();
            sources.dedup();
            let rows: BTreeMap<NodeId, Vec<f64>> = sources
                .par_iter()
                .map(|&u| (u, katz_row(g, u, params.katz_beta, params.katz_length)))
                .collect();
            pairs.iter().map(|&(u, v)| rows[&u][v as usize]).collect()
        }
        SimilarityMethod::HittingTime
        | SimilarityMethod::NormHittingTime
        | SimilarityMethod::CommuteTime
        | SimilarityMethod::NormCommuteTime => {
            let symmetric = matches!(
                method,
                SimilarityMethod::CommuteTime | SimilarityMethod::NormCommuteTime
            );
            let mut targets: Vec<NodeId> = Vec::new();
            for &(u, v) in pairs {
                targets.push(v);
                if symmetric {
                    targets.push(u);
                }
            }
            targets.sort_unstable();
            targets.dedup();
            let solved: Result<BTreeMap<NodeId, Vec<f64>>, SimError> = targets
                .par_iter()
                .map(|&t| hitting_time(g, t, params.solver_tol).map(|h| (t, h)))
                .collect();
            let solved = solved?;
            pairs
                .iter()
                .map(|&(u, v)| {
                    let huv = solved[&v][u as usize];
                    match method {
                        SimilarityMethod::HittingTime => -huv,
                        SimilarityMethod::NormHittingTime => {
                            -huv * g.stationary_probability(v).unwrap()
                        }
                        SimilarityMethod::CommuteTime => -(huv + solved[&u][v as usize]),
                        _ => {
                            -(huv * g.stationary_probability(v).unwrap()
                                + solved[&u][v as usize] * g.stationary_probability(u).unwrap())
                        }
                    }
                })
                .collect()
        }
    };
    debug_assert!(scores.iter().all(|s| s.is_finite()));
    Ok(ScoreSheet { method: method.name().to_string(), pairs: pairs.to_vec(), scores })
}

/// Scores the same pair list under several methods, sharing hitting-time
/// solves across the whole group. Sheets come back in method order.
pub fn score_pairs_many(
    g: &Graph,
    methods: &[SimilarityMethod],
    params: &SimilarityParams,
    pairs: &[Pair],
) -> Result<Vec<ScoreSheet>, SimError> {
    let ht_family: Vec<SimilarityMethod> = methods
        .iter()
        .copied()
        .filter(|m| {
            matches!(
                m,
                SimilarityMethod::HittingTime
                    | SimilarityMethod::NormHittingTime
                    | SimilarityMethod::CommuteTime
                    | SimilarityMethod::NormCommuteTime
            )
        })
        .collect();
    let solved: BTreeMap<NodeId, Vec<f64>> = if ht_family.is_empty() {
        BTreeMap::new()
    } else {
        let needs_both = ht_family
            .iter()
            .any(|m| matches!(m, SimilarityMethod::CommuteTime | SimilarityMethod::NormCommuteTime));
        let mut targets: Vec<NodeId> = Vec::new();
        for &(u, v) in pairs {
            targets.push(v);
            if needs_both {
                targets.push(u);
            }
        }
        targets.sort_unstable();
        targets.dedup();
        let result: Result<BTreeMap<NodeId, Vec<f64>>, SimError> = targets
            .par_iter()
            .map(|&t| hitting_time(g, t, params.solver_tol).map(|h| (t, h)))
            .collect();
        result?
    };

    let mut sheets = Vec::with_capacity(methods.len());
    for &method in methods {
        let sheet = match method {
            SimilarityMethod::HittingTime
            | SimilarityMethod::NormHittingTime
            | SimilarityMethod::CommuteTime
            | SimilarityMethod::NormCommuteTime => {
                for &(u, v) in pairs {
                    check_pair(g, u, v)?;
                    if g.has_edge(u, v) {
                        return Err(SimError::PairIsEdge(u, v));
                    }
                }
                let scores = pairs
                    .iter()
                    .map(|&(u, v)| {
                        let huv = solved[&v][u as usize];
                        match method {
                            SimilarityMethod::HittingTime => -huv,
                            SimilarityMethod::NormHittingTime => {
                                -huv * g.stationary_probability(v).unwrap()
                            }
                            SimilarityMethod::CommuteTime => -(huv + solved[&u][v as usize]),
                            _ => {
                                -(huv * g.stationary_probability(v).unwrap()
                                    + solved[&u][v as usize] * g.stationary_probability(u).unwrap())
                            }
                        }
                    })
                    .collect();
                ScoreSheet { method: method.name().to_string(), pairs: pairs.to_vec(), scores }
            }
            _ => score_pairs(g, method, params, pairs)?,
        };
        sheets.push(sheet);
    }
    Ok(sheets)
}
