//! CART split finding: candidate thresholds, impurity criteria, the quality
//! curve over all candidates, and the best split for a node.
//!
//! Everything here is deterministic: candidate thresholds are midpoints
//! between consecutive distinct sorted values, and ties in the criterion are
//! broken by lower feature index, then lower threshold.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Split quality criterion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Gini,
    InfoGain,
}

/// Candidate thresholds paired with their criterion gains at one node.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityCurve {
    /// Strictly increasing candidate thresholds.
    pub thresholds: Vec<f64>,
    /// Gain at each candidate, same length as `thresholds`.
    pub scores: Vec<f64>,
    /// Position of the maximal score (ties go to the lowest index);
    /// `None` for an empty curve.
    pub best_index: Option<usize>,
}

impl QualityCurve {
    pub fn empty() -> Self {
        QualityCurve {
            thresholds: Vec::new(),
            scores: Vec::new(),
            best_index: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// Best `(threshold, score)` pair, if any.
    pub fn best(&self) -> Option<(f64, f64)> {
        self.best_index
            .map(|i| (self.thresholds[i], self.scores[i]))
    }
}

/// The winning split of a node: feature, threshold, gain, the entropy
/// statistics recomputed at the threshold, and the full quality curve of the
/// chosen feature.
#[derive(Clone, Debug)]
pub struct SplitChoice {
    pub feature: usize,
    pub theta: f64,
    pub gain: f64,
    /// Entropy-based information gain at `theta`, in bits.
    pub info_gain: f64,
    /// Binary entropy of the left/right proportions at `theta`, in bits.
    pub split_entropy: f64,
    pub curve: QualityCurve,
}

fn accumulate_counts(labels: &[usize], weights: &[f64], n_classes: usize) -> (Vec<f64>, f64) {
    let mut counts = vec![0.0; n_classes];
    let mut total = 0.0;
    for (&y, &w) in labels.iter().zip(weights) {
        counts[y] += w;
        total += w;
    }
    (counts, total)
}

fn gini_from_counts(counts: &[f64], total: f64) -> f64 {
    let mut sum_sq = 0.0;
    for c in counts {
        let p = c / total;
        sum_sq += p * p;
    }
    1.0 - sum_sq
}

fn entropy_from_counts(counts: &[f64], total: f64) -> f64 {
    let mut h = 0.0;
    for c in counts {
        if *c > 0.0 {
            let p = c / total;
            h -= p * p.log2();
        }
    }
    h
}

fn impurity_from_counts(counts: &[f64], total: f64, criterion: Criterion) -> f64 {
    match criterion {
        Criterion::Gini => gini_from_counts(counts, total),
        Criterion::InfoGain => entropy_from_counts(counts, total),
    }
}

/// Weighted Gini impurity `1 - sum_k p_k^2`.
pub fn gini_impurity(labels: &[usize], weights: &[f64], n_classes: usize) -> Result<f64> {
    let (counts, total) = accumulate_counts(labels, weights, n_classes);
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(gini_from_counts(&counts, total))
}

/// Weighted Shannon entropy in bits.
pub fn entropy_impurity(labels: &[usize], weights: &[f64], n_classes: usize) -> Result<f64> {
    let (counts, total) = accumulate_counts(labels, weights, n_classes);
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(entropy_from_counts(&counts, total))
}

/// Midpoints between consecutive distinct sorted values; empty for a
/// constant column.
pub fn candidate_thresholds(column: &[f64]) -> Vec<f64> {
    assert!(!column.is_empty(), "column must be non-empty");
    let mut sorted = column.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite features"));
    sorted.dedup();
    sorted
        .windows(2)
        .map(|pair| (pair[0] + pair[1]) / 2.0)
        .collect()
}

/// Gain `Q(theta)` at every candidate threshold of one column, computed in a
/// single sorted sweep.
///
/// The gain is parent impurity minus the weighted mean child impurity, so
/// every score is non-negative. Returns an empty curve for a constant
/// column.
pub fn evaluate_split_curve(
    column: &[f64],
    labels: &[usize],
    weights: &[f64],
    n_classes: usize,
    criterion: Criterion,
) -> QualityCurve {
    let n = column.len();
    debug_assert_eq!(n, labels.len());
    debug_assert_eq!(n, weights.len());
    if n < 2 {
        return QualityCurve::empty();
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| column[a].partial_cmp(&column[b]).expect("finite features"));

    let (total_counts, total_weight) = accumulate_counts(labels, weights, n_classes);
    if total_weight <= 0.0 {
        return QualityCurve::empty();
    }
    let parent = impurity_from_counts(&total_counts, total_weight, criterion);

    let mut thresholds = Vec::new();
    let mut scores = Vec::new();
    let mut left_counts = vec![0.0; n_classes];
    let mut left_weight = 0.0;
    for pos in 0..n - 1 {
        let i = order[pos];
        left_counts[labels[i]] += weights[i];
        left_weight += weights[i];
        let here = column[i];
        let next = column[order[pos + 1]];
        if next <= here {
            continue; // not a boundary between distinct values
        }
        let threshold = (here + next) / 2.0;
        let right_weight = total_weight - left_weight;
        let left_impurity = if left_weight > 0.0 {
            impurity_from_counts(&left_counts, left_weight, criterion)
        } else {
            0.0
        };
        let right_impurity = if right_weight > 0.0 {
            let right_counts: Vec<f64> = total_counts
                .iter()
                .zip(&left_counts)
                .map(|(t, l)| t - l)
                .collect();
            impurity_from_counts(&right_counts, right_weight, criterion)
        } else {
            0.0
        };
        let gain = parent
            - (left_weight / total_weight) * left_impurity
            - (right_weight / total_weight) * right_impurity;
        thresholds.push(threshold);
        scores.push(gain.max(0.0));
    }

    let best_index = best_score_index(&scores);
    QualityCurve {
        thresholds,
        scores,
        best_index,
    }
}

fn best_score_index(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        match best {
            Some(b) if *s <= scores[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Entropy statistics at a fixed `(feature, theta)` split: information gain
/// and the binary entropy of the split proportions, both in bits.
fn entropy_stats_at(
    column: &[f64],
    labels: &[usize],
    weights: &[f64],
    n_classes: usize,
    theta: f64,
) -> (f64, f64) {
    let mut left_counts = vec![0.0; n_classes];
    let mut right_counts = vec![0.0; n_classes];
    let mut left_weight = 0.0;
    let mut right_weight = 0.0;
    for ((&x, &y), &w) in column.iter().zip(labels).zip(weights) {
        if x <= theta {
            left_counts[y] += w;
            left_weight += w;
        } else {
            right_counts[y] += w;
            right_weight += w;
        }
    }
    let total = left_weight + right_weight;
    let parent_counts: Vec<f64> = left_counts
        .iter()
        .zip(&right_counts)
        .map(|(l, r)| l + r)
        .collect();
    let parent = entropy_from_counts(&parent_counts, total);
    let mut info_gain = parent;
    let mut split_entropy = 0.0;
    for (side_counts, side_weight) in [(&left_counts, left_weight), (&right_counts, right_weight)] {
        if side_weight > 0.0 {
            let p = side_weight / total;
            info_gain -= p * entropy_from_counts(side_counts, side_weight);
            split_entropy -= p * p.log2();
        }
    }
    (info_gain.max(0.0), split_entropy)
}

/// Best split over all features of the node view, or `None` when no
/// candidate achieves positive gain.
///
/// Ties are broken by lower feature index, then lower threshold. The entropy
/// statistics are always recomputed at the winning threshold regardless of
/// the selection criterion.
pub fn best_split(data: &Dataset, rows: &[usize], criterion: Criterion) -> Option<SplitChoice> {
    if rows.len() < 2 {
        return None;
    }
    let labels = data.labels_at(rows);
    let weights = data.weights_at(rows);
    let n_classes = data.n_classes();

    let mut choice: Option<SplitChoice> = None;
    for feature in 0..data.n_features() {
        let column = data.column_at(feature, rows);
        let curve = evaluate_split_curve(&column, &labels, &weights, n_classes, criterion);
        let Some((theta, gain)) = curve.best() else {
            continue;
        };
        let better = match &choice {
            Some(c) => gain > c.gain,
            None => true,
        };
        if better {
            choice = Some(SplitChoice {
                feature,
                theta,
                gain,
                info_gain: 0.0,
                split_entropy: 0.0,
                curve,
            });
        }
    }

    let mut choice = choice.filter(|c| c.gain > 0.0)?;
    let column = data.column_at(choice.feature, rows);
    let (info_gain, split_entropy) =
        entropy_stats_at(&column, &labels, &weights, n_classes, choice.theta);
    choice.info_gain = info_gain;
    choice.split_entropy = split_entropy;
    Some(choice)
}
