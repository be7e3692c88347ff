//! Evaluation metrics: AUROC, precision-recall curves, average precision
//! and precision-at-k, all with explicit tie handling.

use serde::Serialize;
use thiserror::Error;

use crate::split::Skew;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("scores and labels have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("metric requires both classes, got {positives} positives out of {total}")]
    SingleClass { positives: usize, total: usize },
    #[error("k = {k} out of range 1..={total}")]
    KOutOfRange { k: usize, total: usize },
    #[error("non-finite score at index {0}")]
    NonFiniteScore(usize),
}

fn check_input(scores: &[f64], labels: &[bool]) -> Result<(usize, usize), MetricError> {
    if scores.len() != labels.len() {
        return Err(MetricError::LengthMismatch(scores.len(), labels.len()));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(MetricError::NonFiniteScore(i));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    Ok((positives, scores.len()))
}

/// Indices sorted by descending score; equal scores form one tie block.
fn descending_blocks(scores: &[f64]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match blocks.last_mut() {
            Some(block) if scores[block[0]] == scores[i] => block.push(i),
            _ => blocks.push(vec![i]),
        }
    }
    blocks
}

/// Mann–Whitney AUROC: the probability that a positive outranks a
/// negative, ties counting one half. Sort-and-rank, O(n log n).
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64, MetricError> {
    let (p, total) = check_input(scores, labels)?;
    let n = total - p;
    if p == 0 || n == 0 {
        return Err(MetricError::SingleClass { positives: p, total });
    }
    // average ranks (1-based) with ties sharing their mean rank
    let mut idx: Vec<usize> = (0..total).collect();
    idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < total {
        let mut j = i;
        while j + 1 < total && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &k in &idx[i..=j] {
            if labels[k] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }
    Ok((rank_sum_pos - (p * (p + 1)) as f64 / 2.0) / (p as f64 * n as f64))
}

/// Precision-recall curve: one point per distinct threshold, descending,
/// with a leading anchor at recall zero.
pub fn pr_curve(scores: &[f64], labels: &[bool]) -> Result<Vec<(f64, f64)>, MetricError> {
    let (p, total) = check_input(scores, labels)?;
    if p == 0 {
        return Err(MetricError::SingleClass { positives: p, total });
    }
    let mut points = Vec::new();
    let mut tp = 0usize;
    let mut seen = 0usize;
    for block in descending_blocks(scores) {
        tp += block.iter().filter(|&&i| labels[i]).count();
        seen += block.len();
        points.push((tp as f64 / p as f64, tp as f64 / seen as f64));
    }
    let first_precision = points[0].1;
    let mut curve = vec![(0.0, first_precision)];
    curve.extend(points);
    Ok(curve)
}

/// Average precision by step integration over tie blocks: each block adds
/// `delta_recall * precision_at_block_end`. No interpolation.
pub fn aupr(scores: &[f64], labels: &[bool]) -> Result<f64, MetricError> {
    let (p, total) = check_input(scores, labels)?;
    if p == 0 {
        return Err(MetricError::SingleClass { positives: p, total });
    }
    let mut ap = 0.0f64;
    let mut tp = 0usize;
    let mut seen = 0usize;
    for block in descending_blocks(scores) {
        let block_tp = block.iter().filter(|&&i| labels[i]).count();
        tp += block_tp;
        seen += block.len();
        if block_tp > 0 {
            let precision = tp as f64 / seen as f64;
            ap += (block_tp as f64 / p as f64) * precision;
        }
    }
    Ok(ap)
}

/// Fraction of positives among the top k by score. A tie block straddling
/// the k boundary contributes its expected value: remaining slots times
/// the block's positive rate.
pub fn precision_at_k(scores: &[f64], labels: &[bool], k: usize) -> Result<f64, MetricError> {
    let (_, total) = check_input(scores, labels)?;
    if k == 0 || k > total {
        return Err(MetricError::KOutOfRange { k, total });
    }
    let mut taken = 0usize;
    let mut hits = 0.0f64;
    for block in descending_blocks(scores) {
        let block_tp = block.iter().filter(|&&i| labels[i]).count();
        if taken + block.len() <= k {
            hits += block_tp as f64;
            taken += block.len();
            if taken == k {
                break;
            }
        } else {
            let slots = k - taken;
            hits += slots as f64 * block_tp as f64 / block.len() as f64;
            taken = k;
            break;
        }
    }
    debug_assert_eq!(taken, k);
    Ok(hits / k as f64)
}

/// The four cell metrics plus bookkeeping counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricRecord {
    pub auroc: f64,
    pub aupr: f64,
    pub pr_at_p: f64,
    pub pr_at_p_half: f64,
    pub positives: usize,
    pub total: usize,
    pub skew: Skew,
}

/// Evaluates one (scores, labels) cell; `Pr@P` uses k = P and `Pr@P/2`
/// uses k = ceil(P / 2).
pub fn evaluate_cell(scores: &[f64], labels: &[bool], skew: Skew) -> Result<MetricRecord, MetricError> {
    let (p, total) = check_input(scores, labels)?;
    if p == 0 || p == total {
        return Err(MetricError::SingleClass { positives: p, total });
    }
    Ok(MetricRecord {
        auroc: auroc(scores, labels)?,
        aupr: aupr(scores, labels)?,
        pr_at_p: precision_at_k(scores, labels, p)?,
        pr_at_p_half: precision_at_k(scores, labels, p.div_ceil(2))?,
        positives: p,
        total,
        skew,
    })
}
