//! Reference binary CART.
//!
//! A self-contained recursive implementation with its own split search.
//! It serves as the comparison baseline in benchmarks and as the reference
//! for the zero-half-width equivalence checks, under the same contract as
//! the main splitter: midpoint candidates, positive-gain splits only, ties
//! broken by lower feature index then lower threshold.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::splitter::Criterion;
use crate::ternary::ClassDistribution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CartNode {
    Leaf {
        dist: ClassDistribution,
        n: usize,
    },
    Split {
        feature: usize,
        theta: f64,
        left: Box<CartNode>,
        right: Box<CartNode>,
    },
}

/// A fitted binary CART classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryCart {
    pub root: CartNode,
    pub n_classes: usize,
    pub max_depth: usize,
    pub criterion: Criterion,
}

fn impurity(counts: &[f64], total: f64, criterion: Criterion) -> f64 {
    match criterion {
        Criterion::Gini => {
            let mut sum_sq = 0.0;
            for c in counts {
                let p = c / total;
                sum_sq += p * p;
            }
            1.0 - sum_sq
        }
        Criterion::InfoGain => {
            let mut h = 0.0;
            for c in counts {
                if *c > 0.0 {
                    let p = c / total;
                    h -= p * p.log2();
                }
            }
            h
        }
    }
}

fn node_counts(data: &Dataset, rows: &[usize]) -> (Vec<f64>, f64) {
    let mut counts = vec![0.0; data.n_classes()];
    let mut total = 0.0;
    for &i in rows {
        counts[data.labels()[i]] += data.weights()[i];
        total += data.weights()[i];
    }
    (counts, total)
}

fn search_split(data: &Dataset, rows: &[usize], criterion: Criterion) -> Option<(usize, f64, f64)> {
    let (parent_counts, total) = node_counts(data, rows);
    if total <= 0.0 {
        return None;
    }
    let parent = impurity(&parent_counts, total, criterion);
    let k = data.n_classes();

    let mut best: Option<(usize, f64, f64)> = None;
    let mut sorted: Vec<(f64, usize, f64)> = Vec::with_capacity(rows.len());
    for feature in 0..data.n_features() {
        sorted.clear();
        sorted.extend(rows.iter().map(|&i| {
            (
                data.feature(i, feature),
                data.labels()[i],
                data.weights()[i],
            )
        }));
        sorted.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        let mut left_counts = vec![0.0; k];
        let mut left_weight = 0.0;
        for pos in 0..sorted.len() - 1 {
            let (value, label, weight) = sorted[pos];
            left_counts[label] += weight;
            left_weight += weight;
            let next = sorted[pos + 1].0;
            if next <= value {
                continue;
            }
            let theta = (value + next) / 2.0;
            let right_weight = total - left_weight;
            let right_counts: Vec<f64> = parent_counts
                .iter()
                .zip(&left_counts)
                .map(|(p, l)| p - l)
                .collect();
            let left_impurity = if left_weight > 0.0 {
                impurity(&left_counts, left_weight, criterion)
            } else {
                0.0
            };
            let right_impurity = if right_weight > 0.0 {
                impurity(&right_counts, right_weight, criterion)
            } else {
                0.0
            };
            let gain = parent
                - (left_weight / total) * left_impurity
                - (right_weight / total) * right_impurity;
            let gain = gain.max(0.0);
            if best.is_none_or(|(_, _, g)| gain > g) {
                best = Some((feature, theta, gain));
            }
        }
    }
    best.filter(|(_, _, g)| *g > 0.0)
}

fn grow(
    data: &Dataset,
    rows: &[usize],
    depth: usize,
    params: &BinaryCartParams,
) -> Result<CartNode> {
    let (counts, _) = node_counts(data, rows);
    let dist = ClassDistribution::from_weighted_counts(&counts)?;
    let labels = data.labels_at(rows);
    let pure = labels.windows(2).all(|w| w[0] == w[1]);
    if depth >= params.max_depth || rows.len() < 2 || pure {
        return Ok(CartNode::Leaf {
            dist,
            n: rows.len(),
        });
    }
    let Some((feature, theta, _)) = search_split(data, rows, params.criterion) else {
        return Ok(CartNode::Leaf {
            dist,
            n: rows.len(),
        });
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&i| data.feature(i, feature) <= theta);
    Ok(CartNode::Split {
        feature,
        theta,
        left: Box::new(grow(data, &left_rows, depth + 1, params)?),
        right: Box::new(grow(data, &right_rows, depth + 1, params)?),
    })
}

struct BinaryCartParams {
    max_depth: usize,
    criterion: Criterion,
}

impl BinaryCart {
    pub fn fit(data: &Dataset, max_depth: usize, criterion: Criterion) -> Result<Self> {
        if data.n_rows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if data.n_classes() < 2 {
            return Err(Error::TooFewClasses(data.n_classes()));
        }
        let rows: Vec<usize> = (0..data.n_rows()).collect();
        let params = BinaryCartParams {
            max_depth,
            criterion,
        };
        Ok(BinaryCart {
            root: grow(data, &rows, 0, &params)?,
            n_classes: data.n_classes(),
            max_depth,
            criterion,
        })
    }

    pub fn predict_proba(&self, row: &[f64]) -> Result<&ClassDistribution> {
        let mut node = &self.root;
        loop {
            match node {
                CartNode::Leaf { dist, .. } => return Ok(dist),
                CartNode::Split {
                    feature,
                    theta,
                    left,
                    right,
                } => {
                    let x = *row.get(*feature).ok_or(Error::FeatureOutOfRange {
                        index: *feature,
                        len: row.len(),
                    })?;
                    node = if x <= *theta { left } else { right };
                }
            }
        }
    }

    /// Predicted class; argmax ties go to the lowest class index.
    pub fn predict(&self, row: &[f64]) -> Result<usize> {
        Ok(self.predict_proba(row)?.argmax())
    }

    pub fn accuracy(&self, data: &Dataset, rows: &[usize]) -> Result<f64> {
        let mut correct = 0usize;
        for &i in rows {
            if self.predict(data.row(i))? == data.labels()[i] {
                correct += 1;
            }
        }
        Ok(correct as f64 / rows.len() as f64)
    }
}
