//! Five-fold stratified cross-validation with an L2 logistic regression,
//! producing one out-of-fold probability per example.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EmbedError;

const L2_LAMBDA: f64 = 1.0;
const GRAD_TOL: f64 = 1e-6;
const MAX_ITERS: usize = 1000;

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Per-feature standardization statistics from a training fold.
struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    fn fit(rows: &[&[f64]]) -> Standardizer {
        let d = rows.first().map_or(0, |r| r.len());
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for row in rows {
            for (m, x) in mean.iter_mut().zip(row.iter()) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut std = vec![0.0; d];
        for row in rows {
            for ((s, x), m) in std.iter_mut().zip(row.iter()).zip(mean.iter()) {
                *s += (x - m) * (x - m);
            }
        }
        for s in &mut std {
            *s = (*s / n).sqrt();
            if *s < 1e-12 {
                *s = 1.0; // constant feature: leave it centered
            }
        }
        Standardizer { mean, std }
    }

    fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(self.std.iter()))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}

/// Weights plus unregularized intercept.
struct LogisticModel {
    weights: Vec<f64>,
    intercept: f64,
}

impl LogisticModel {
    /// Gradient descent with Armijo backtracking on the mean log-loss plus
    /// an L2 penalty on the weights.
    fn fit(rows: &[Vec<f64>], labels: &[bool]) -> LogisticModel {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let lambda = L2_LAMBDA / n as f64;
        let mut w = vec![0.0; d];
        let mut b = 0.0;

        let objective = |w: &[f64], b: f64| -> f64 {
            let mut loss = 0.0;
            for (row, &y) in rows.iter().zip(labels) {
                let z: f64 = row.iter().zip(w).map(|(x, wi)| x * wi).sum::<f64>() + b;
                // -ln sigma(z) for positives, -ln sigma(-z) for negatives
                let t = if y { -z } else { z };
                loss += t.max(0.0) + (-t.abs()).exp().ln_1p();
            }
            loss / n as f64 + 0.5 * lambda * w.iter().map(|x| x * x).sum::<f64>()
        };

        let mut step = 1.0;
        for _ in 0..MAX_ITERS {
            let mut grad_w = vec![0.0; d];
            let mut grad_b = 0.0;
            for (row, &y) in rows.iter().zip(labels) {
                let z: f64 = row.iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>() + b;
                let err = sigmoid(z) - if y { 1.0 } else { 0.0 };
                for (g, x) in grad_w.iter_mut().zip(row.iter()) {
                    *g += err * x;
                }
                grad_b += err;
            }
            for (g, wi) in grad_w.iter_mut().zip(&w) {
                *g = *g / n as f64 + lambda * wi;
            }
            grad_b /= n as f64;

            let grad_norm = grad_w
                .iter()
                .chain(std::iter::once(&grad_b))
                .fold(0.0f64, |acc, g| acc.max(g.abs()));
            if grad_norm < GRAD_TOL {
                break;
            }

            let grad_sq: f64 =
                grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b;
            let current = objective(&w, b);
            step *= 2.0; // allow the step to grow back after cautious iterations
            loop {
                let cand_w: Vec<f64> = w.iter().zip(&grad_w).map(|(wi, g)| wi - step * g).collect();
                let cand_b = b - step * grad_b;
                if objective(&cand_w, cand_b) <= current - 0.5 * step * grad_sq || step < 1e-12 {
                    w = cand_w;
                    b = cand_b;
                    break;
                }
                step *= 0.5;
            }
        }
        LogisticModel { weights: w, intercept: b }
    }

    fn predict(&self, row: &[f64]) -> f64 {
        let z: f64 = row.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>() + self.intercept;
        sigmoid(z)
    }
}

/// Deals shuffled positives and negatives round-robin into `folds` folds,
/// keeping the class ratio within one example per fold.
fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Result<Vec<usize>, EmbedError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if pos.len() < folds || neg.len() < folds {
        return Err(EmbedError::StratificationFailure {
            positives: pos.len(),
            negatives: neg.len(),
            folds,
        });
    }
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut assignment = vec![0usize; labels.len()];
    for (k, &i) in pos.iter().enumerate() {
        assignment[i] = k % folds;
    }
    for (k, &i) in neg.iter().enumerate() {
        assignment[i] = k % folds;
    }
    Ok(assignment)
}

/// Every example is scored by the one fold model that never saw it.
/// Standardization statistics come from the training folds only.
pub fn out_of_fold_scores(
    features: &[Vec<f64>],
    labels: &[bool],
    folds: usize,
    seed: u64,
) -> Result<Vec<f64>, EmbedError> {
    assert_eq!(features.len(), labels.len());
    let assignment = stratified_folds(labels, folds, seed)?;
    let mut scores = vec![0.0f64; features.len()];
    for fold in 0..folds {
        let train_rows: Vec<&[f64]> = features
            .iter()
            .enumerate()
            .filter(|(i, _)| assignment[*i] != fold)
            .map(|(_, r)| r.as_slice())
            .collect();
        let train_labels: Vec<bool> = labels
            .iter()
            .enumerate()
            .filter(|(i, _)| assignment[*i] != fold)
            .map(|(_, &l)| l)
            .collect();
        let standardizer = Standardizer::fit(&train_rows);
        let std_rows: Vec<Vec<f64>> = train_rows.iter().map(|r| standardizer.apply(r)).collect();
        let model = LogisticModel::fit(&std_rows, &train_labels);
        for (i, row) in features.iter().enumerate() {
            if assignment[i] == fold {
                scores[i] = model.predict(&standardizer.apply(row));
            }
        }
    }
    Ok(scores)
}
