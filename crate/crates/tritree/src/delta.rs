//! Locally-adaptive estimators of the uncertainty-zone half-width.
//!
//! Each estimator consumes only statistics already available after standard
//! CART split finding at a node: the chosen feature's column, labels,
//! weights, the optimal threshold, and the quality curve over all candidate
//! thresholds. Every estimator returns a non-negative half-width, and
//! [`compute_delta`] clamps the result to at most 25% of the node-local
//! column range.
//!
//! The five estimators read different signals:
//!
//! - **quality plateau**: width of the near-optimal region of the quality
//!   curve — a flat curve means the data barely constrains the threshold;
//! - **class overlap**: trimmed overlap of class-conditional feature
//!   distributions;
//! - **gain ratio**: a fraction of the feature range shrunk by how
//!   informative the split is relative to its balance;
//! - **node bootstrap**: standard deviation of the refit threshold under
//!   resampling of the node's rows;
//! - **margin**: distance from the threshold to the nearest cross-class
//!   training example, with a straddling-gap fallback for clean splits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::splitter::{evaluate_split_curve, Criterion, QualityCurve};

/// Which half-width estimator to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaKind {
    QualityPlateau,
    ClassOverlap,
    GainRatio,
    NodeBootstrap,
    Margin,
    /// Always zero: recovers plain binary CART through the same machinery.
    Zero,
}

impl DeltaKind {
    pub fn name(self) -> &'static str {
        match self {
            DeltaKind::QualityPlateau => "quality_plateau",
            DeltaKind::ClassOverlap => "class_overlap",
            DeltaKind::GainRatio => "gain_ratio",
            DeltaKind::NodeBootstrap => "node_bootstrap",
            DeltaKind::Margin => "margin",
            DeltaKind::Zero => "zero",
        }
    }
}

/// An estimator kind together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaMethod {
    pub kind: DeltaKind,
    /// Plateau tolerance for `QualityPlateau`.
    pub epsilon: f64,
    /// Percentile for `ClassOverlap`.
    pub q: f64,
    /// Scale parameter for `GainRatio`.
    pub alpha: f64,
    /// Use the full straddling gap instead of half of it in the margin
    /// fallback for perfectly clean splits.
    pub margin_full_gap: bool,
}

impl DeltaMethod {
    pub fn new(kind: DeltaKind) -> Self {
        DeltaMethod {
            kind,
            epsilon: 0.05,
            q: 0.10,
            alpha: 0.10,
            margin_full_gap: false,
        }
    }

    pub fn quality_plateau() -> Self {
        Self::new(DeltaKind::QualityPlateau)
    }

    pub fn class_overlap() -> Self {
        Self::new(DeltaKind::ClassOverlap)
    }

    pub fn gain_ratio() -> Self {
        Self::new(DeltaKind::GainRatio)
    }

    pub fn node_bootstrap() -> Self {
        Self::new(DeltaKind::NodeBootstrap)
    }

    pub fn margin() -> Self {
        Self::new(DeltaKind::Margin)
    }

    pub fn zero() -> Self {
        Self::new(DeltaKind::Zero)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be in [0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.q > 0.0 && self.q < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "q must be in (0, 0.5), got {}",
                self.q
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Node-local split statistics consumed by the estimators.
#[derive(Clone, Debug)]
pub struct NodeContext<'a> {
    /// Values of the chosen feature at the node.
    pub column: &'a [f64],
    pub labels: &'a [usize],
    pub weights: &'a [f64],
    /// The optimal threshold.
    pub theta: f64,
    /// Quality curve of the chosen feature.
    pub curve: &'a QualityCurve,
    /// Information gain at `theta`, in bits.
    pub info_gain: f64,
    /// Binary entropy of the split proportions at `theta`, in bits.
    pub split_entropy: f64,
}

impl NodeContext<'_> {
    pub fn column_range(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in self.column {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if hi > lo {
            hi - lo
        } else {
            0.0
        }
    }
}

/// Half-width of the maximal contiguous run of candidates around the best
/// one whose score stays within `(1 - epsilon)` of the best score.
pub fn delta_quality_plateau(ctx: &NodeContext, epsilon: f64) -> f64 {
    let Some(best) = ctx.curve.best_index else {
        return 0.0;
    };
    let scores = &ctx.curve.scores;
    let q_star = scores[best];
    if q_star <= 0.0 {
        return 0.0;
    }
    let floor = (1.0 - epsilon) * q_star;
    let mut lo = best;
    while lo > 0 && scores[lo - 1] >= floor {
        lo -= 1;
    }
    let mut hi = best;
    while hi + 1 < scores.len() && scores[hi + 1] >= floor {
        hi += 1;
    }
    (ctx.curve.thresholds[hi] - ctx.curve.thresholds[lo]) / 2.0
}

/// Linear-interpolation percentile of a sorted slice.
fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[sorted.len() - 1]
    }
}

/// Half of the widest trimmed overlap between any two class-conditional
/// feature distributions; zero when every pair is disjoint after trimming.
pub fn delta_class_overlap(ctx: &NodeContext, q: f64) -> f64 {
    let n_classes = ctx.labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<f64>> = vec![Vec::new(); n_classes];
    for (&x, &y) in ctx.column.iter().zip(ctx.labels) {
        by_class[y].push(x);
    }
    let mut percentiles: Vec<(f64, f64)> = Vec::new();
    for values in &mut by_class {
        if values.is_empty() {
            continue;
        }
        values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite features"));
        percentiles.push((
            percentile_sorted(values, q),
            percentile_sorted(values, 1.0 - q),
        ));
    }
    if percentiles.len() < 2 {
        return 0.0;
    }
    let mut widest: f64 = 0.0;
    for i in 0..percentiles.len() {
        for j in i + 1..percentiles.len() {
            let (lo_i, hi_i) = percentiles[i];
            let (lo_j, hi_j) = percentiles[j];
            let bracket = (hi_i.min(hi_j) - lo_i.max(lo_j)).max(0.0);
            widest = widest.max(bracket);
        }
    }
    widest / 2.0
}

/// `alpha * range / (1 + GR)` where `GR = info_gain / split_entropy`
/// (taken as zero when the split entropy is zero).
pub fn delta_gain_ratio(ctx: &NodeContext, alpha: f64) -> f64 {
    let gain_ratio = if ctx.split_entropy > 0.0 {
        ctx.info_gain / ctx.split_entropy
    } else {
        0.0
    };
    alpha * ctx.column_range() / (1.0 + gain_ratio)
}

/// Number of resamples used by the node bootstrap for a node of `n` rows.
pub fn bootstrap_replicates(n: usize) -> usize {
    if n < 2_000 {
        20
    } else if n < 10_000 {
        15
    } else {
        10
    }
}

/// Population standard deviation of the refit threshold over bootstrap
/// resamples of the node's rows. Resamples with no valid split (constant
/// column or no positive gain) are skipped; fewer than two surviving
/// thresholds give zero.
pub fn delta_node_bootstrap(ctx: &NodeContext, criterion: Criterion, seed: u64) -> f64 {
    let n = ctx.column.len();
    if n < 2 {
        return 0.0;
    }
    let n_classes = ctx.labels.iter().max().map_or(0, |m| m + 1);
    let replicates = bootstrap_replicates(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut thresholds = Vec::with_capacity(replicates);
    let mut column = vec![0.0; n];
    let mut labels = vec![0usize; n];
    let mut weights = vec![0.0; n];
    for _ in 0..replicates {
        for slot in 0..n {
            let pick = rng.random_range(0..n);
            column[slot] = ctx.column[pick];
            labels[slot] = ctx.labels[pick];
            weights[slot] = ctx.weights[pick];
        }
        let curve = evaluate_split_curve(&column, &labels, &weights, n_classes, criterion);
        if let Some((theta, score)) = curve.best() {
            if score > 0.0 {
                thresholds.push(theta);
            }
        }
    }
    if thresholds.len() < 2 {
        return 0.0;
    }
    let mean = thresholds.iter().sum::<f64>() / thresholds.len() as f64;
    let var = thresholds.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / thresholds.len() as f64;
    var.sqrt()
}

fn weighted_majority(
    labels: impl Iterator<Item = usize>,
    weights: impl Iterator<Item = f64>,
) -> Option<usize> {
    let mut counts: Vec<f64> = Vec::new();
    for (y, w) in labels.zip(weights) {
        if y >= counts.len() {
            counts.resize(y + 1, 0.0);
        }
        counts[y] += w;
    }
    let mut best: Option<usize> = None;
    for (k, c) in counts.iter().enumerate() {
        if *c > 0.0 && best.is_none_or(|b| *c > counts[b]) {
            best = Some(k);
        }
    }
    best
}

/// Distance from the threshold to the nearest cross-class training example:
/// the closest right-side sample carrying the left majority class, or the
/// closest left-side sample carrying the right majority class, whichever is
/// nearer. A perfectly clean split falls back to the gap between the two
/// values straddling the threshold (half of it unless `full_gap`).
pub fn delta_margin(ctx: &NodeContext, full_gap: bool) -> f64 {
    let theta = ctx.theta;
    let left = |i: usize| ctx.column[i] <= theta;
    let majority_left = weighted_majority(
        (0..ctx.column.len())
            .filter(|&i| left(i))
            .map(|i| ctx.labels[i]),
        (0..ctx.column.len())
            .filter(|&i| left(i))
            .map(|i| ctx.weights[i]),
    );
    let majority_right = weighted_majority(
        (0..ctx.column.len())
            .filter(|&i| !left(i))
            .map(|i| ctx.labels[i]),
        (0..ctx.column.len())
            .filter(|&i| !left(i))
            .map(|i| ctx.weights[i]),
    );
    let (Some(c_left), Some(c_right)) = (majority_left, majority_right) else {
        return 0.0;
    };

    let mut nearest: Option<f64> = None;
    for (&x, &y) in ctx.column.iter().zip(ctx.labels) {
        let dist = if x > theta && y == c_left {
            x - theta
        } else if x <= theta && y == c_right {
            theta - x
        } else {
            continue;
        };
        if nearest.is_none_or(|d| dist < d) {
            nearest = Some(dist);
        }
    }
    if let Some(d) = nearest {
        return d;
    }

    // Clean split: no intruders on either side.
    let mut below = f64::NEG_INFINITY;
    let mut above = f64::INFINITY;
    for &x in ctx.column {
        if x <= theta && x > below {
            below = x;
        }
        if x > theta && x < above {
            above = x;
        }
    }
    if !below.is_finite() || !above.is_finite() {
        return 0.0;
    }
    let gap = above - below;
    if full_gap {
        gap
    } else {
        gap / 2.0
    }
}

/// Clamp a half-width to at most 25% of the column range.
pub fn clamp_delta(delta: f64, column_range: f64) -> f64 {
    debug_assert!(delta >= 0.0 && column_range >= 0.0);
    delta.min(0.25 * column_range)
}

/// Run the configured estimator and clamp the result to the node-local
/// column range. `seed` feeds the bootstrap's generator only.
pub fn compute_delta(
    ctx: &NodeContext,
    method: &DeltaMethod,
    criterion: Criterion,
    seed: u64,
) -> f64 {
    let raw = match method.kind {
        DeltaKind::QualityPlateau => delta_quality_plateau(ctx, method.epsilon),
        DeltaKind::ClassOverlap => delta_class_overlap(ctx, method.q),
        DeltaKind::GainRatio => delta_gain_ratio(ctx, method.alpha),
        DeltaKind::NodeBootstrap => delta_node_bootstrap(ctx, criterion, seed),
        DeltaKind::Margin => delta_margin(ctx, method.margin_full_gap),
        DeltaKind::Zero => 0.0,
    };
    clamp_delta(raw, ctx.column_range())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::splitter::best_split;
    use proptest::prelude::*;
    use rand_distr::{Distribution, Normal};

    fn curve(thresholds: Vec<f64>, scores: Vec<f64>) -> QualityCurve {
        let mut best: Option<usize> = None;
        for (i, s) in scores.iter().enumerate() {
            if best.is_none_or(|b| *s > scores[b]) {
                best = Some(i);
            }
        }
        QualityCurve {
            thresholds,
            scores,
            best_index: best,
        }
    }

    fn ctx_with_curve<'a>(
        column: &'a [f64],
        labels: &'a [usize],
        weights: &'a [f64],
        theta: f64,
        curve: &'a QualityCurve,
    ) -> NodeContext<'a> {
        NodeContext {
            column,
            labels,
            weights,
            theta,
            curve,
            info_gain: 0.0,
            split_entropy: 1.0,
        }
    }

    /// Build a full context from a 1-D dataset via the splitter, returning
    /// owned parts the caller keeps alive.
    fn split_context(column: &[f64], labels: &[usize]) -> (f64, QualityCurve, f64, f64) {
        let data = Dataset::from_parts(column.to_vec(), 1, labels.to_vec()).unwrap();
        let rows: Vec<usize> = (0..column.len()).collect();
        let choice = best_split(&data, &rows, Criterion::Gini).expect("splittable fixture");
        (
            choice.theta,
            choice.curve,
            choice.info_gain,
            choice.split_entropy,
        )
    }

    #[test]
    fn plateau_isolated_peak_is_zero() {
        let c = curve(vec![1.0, 2.0, 3.0], vec![0.1, 0.5, 0.1]);
        let ctx = ctx_with_curve(&[1.0, 3.0], &[0, 1], &[1.0, 1.0], 2.0, &c);
        assert_eq!(delta_quality_plateau(&ctx, 0.05), 0.0);
    }

    #[test]
    fn plateau_flat_curve_spans_everything() {
        let c = curve(vec![1.0, 3.0, 5.0, 7.0, 9.0], vec![0.2; 5]);
        let ctx = ctx_with_curve(&[1.0, 9.0], &[0, 1], &[1.0, 1.0], 5.0, &c);
        assert_eq!(delta_quality_plateau(&ctx, 0.05), 4.0);
    }

    #[test]
    fn plateau_neighbors_within_tolerance() {
        let q = 0.4;
        let c = curve(vec![2.0, 3.0, 4.0], vec![0.96 * q, q, 0.96 * q]);
        let ctx = ctx_with_curve(&[2.0, 4.0], &[0, 1], &[1.0, 1.0], 3.0, &c);
        assert_eq!(delta_quality_plateau(&ctx, 0.05), 1.0);
    }

    #[test]
    fn plateau_zero_gain_is_zero() {
        let c = curve(vec![1.0, 2.0], vec![0.0, 0.0]);
        let ctx = ctx_with_curve(&[1.0, 2.0], &[0, 1], &[1.0, 1.0], 1.5, &c);
        assert_eq!(delta_quality_plateau(&ctx, 0.05), 0.0);
    }

    #[test]
    fn class_overlap_hand_example() {
        // class 0 at integers 0..=10, class 1 at 5..=15, q = 0.10:
        // trimmed intervals [1, 9] and [6, 14] overlap on [6, 9]
        let mut column = Vec::new();
        let mut labels = Vec::new();
        for v in 0..=10 {
            column.push(v as f64);
            labels.push(0);
        }
        for v in 5..=15 {
            column.push(v as f64);
            labels.push(1);
        }
        let weights = vec![1.0; column.len()];
        let c = curve(vec![5.0], vec![0.1]);
        let ctx = ctx_with_curve(&column, &labels, &weights, 5.0, &c);
        assert!((delta_class_overlap(&ctx, 0.10) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn class_overlap_disjoint_classes_is_zero() {
        let column = [0.0, 0.5, 1.0, 10.0, 10.5, 11.0];
        let labels = [0, 0, 0, 1, 1, 1];
        let weights = [1.0; 6];
        let c = curve(vec![5.5], vec![0.5]);
        let ctx = ctx_with_curve(&column, &labels, &weights, 5.5, &c);
        assert_eq!(delta_class_overlap(&ctx, 0.10), 0.0);
    }

    #[test]
    fn class_overlap_identical_distributions() {
        let values = [1.0, 2.0, 3.0, 4.0, 5.0];
        let mut column = Vec::new();
        let mut labels = Vec::new();
        for (k, class_values) in [values, values].iter().enumerate() {
            for &v in class_values {
                column.push(v);
                labels.push(k);
            }
        }
        let weights = vec![1.0; column.len()];
        let c = curve(vec![3.0], vec![0.1]);
        let ctx = ctx_with_curve(&column, &labels, &weights, 3.0, &c);
        let expected = (percentile_sorted(&values, 0.9) - percentile_sorted(&values, 0.1)) / 2.0;
        assert!((delta_class_overlap(&ctx, 0.10) - expected).abs() < 1e-12);
    }

    #[test]
    fn class_overlap_single_sample_class_degenerates() {
        let column = [1.0, 2.0, 3.0, 2.5];
        let labels = [0, 0, 0, 1];
        let weights = [1.0; 4];
        let c = curve(vec![2.0], vec![0.1]);
        let ctx = ctx_with_curve(&column, &labels, &weights, 2.0, &c);
        // class 1 contributes [2.5, 2.5]; class 0 trims to [1.2, 2.8]
        let d = delta_class_overlap(&ctx, 0.10);
        assert!(
            (0.0..0.2).contains(&d),
            "degenerate percentiles stay tight, got {d}"
        );
    }

    #[test]
    fn gain_ratio_examples() {
        let column = [0.0, 10.0];
        let labels = [0, 1];
        let weights = [1.0, 1.0];
        let c = curve(vec![5.0], vec![0.5]);
        let mut ctx = ctx_with_curve(&column, &labels, &weights, 5.0, &c);
        ctx.info_gain = 0.0;
        ctx.split_entropy = 1.0;
        assert!((delta_gain_ratio(&ctx, 0.10) - 1.0).abs() < 1e-12);
        ctx.info_gain = 1.0;
        assert!((delta_gain_ratio(&ctx, 0.10) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gain_ratio_constant_column_is_zero() {
        let column = [3.0, 3.0, 3.0];
        let labels = [0, 1, 0];
        let weights = [1.0; 3];
        let c = QualityCurve::empty();
        let ctx = ctx_with_curve(&column, &labels, &weights, 3.0, &c);
        assert_eq!(delta_gain_ratio(&ctx, 0.10), 0.0);
    }

    #[test]
    fn gain_ratio_monotone_decreasing_in_gr() {
        let column = [0.0, 10.0];
        let labels = [0, 1];
        let weights = [1.0, 1.0];
        let c = curve(vec![5.0], vec![0.5]);
        let mut previous = f64::INFINITY;
        for gr in [0.0, 0.25, 0.5, 1.0, 2.0, 8.0] {
            let mut ctx = ctx_with_curve(&column, &labels, &weights, 5.0, &c);
            ctx.info_gain = gr;
            ctx.split_entropy = 1.0;
            let d = delta_gain_ratio(&ctx, 0.10);
            assert!(d < previous);
            previous = d;
        }
    }

    #[test]
    fn bootstrap_replicate_schedule() {
        assert_eq!(bootstrap_replicates(500), 20);
        assert_eq!(bootstrap_replicates(1_999), 20);
        assert_eq!(bootstrap_replicates(2_000), 15);
        assert_eq!(bootstrap_replicates(9_999), 15);
        assert_eq!(bootstrap_replicates(10_000), 10);
    }

    #[test]
    fn bootstrap_identical_thresholds_give_zero() {
        // Two tight clusters: every resample that splits at all splits at 5.
        let column = [0.0, 0.0, 0.0, 10.0, 10.0, 10.0];
        let labels = [0, 0, 0, 1, 1, 1];
        let weights = [1.0; 6];
        let (theta, curve, ig, se) = split_context(&column, &labels);
        let ctx = NodeContext {
            column: &column,
            labels: &labels,
            weights: &weights,
            theta,
            curve: &curve,
            info_gain: ig,
            split_entropy: se,
        };
        assert_eq!(delta_node_bootstrap(&ctx, Criterion::Gini, 42), 0.0);
    }

    #[test]
    fn bootstrap_is_deterministic_per_seed() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let column: Vec<f64> = (0..80).map(|_| normal.sample(&mut rng)).collect();
        let labels: Vec<usize> = column.iter().map(|x| usize::from(*x > 0.1)).collect();
        let weights = vec![1.0; column.len()];
        let (theta, curve, ig, se) = split_context(&column, &labels);
        let ctx = NodeContext {
            column: &column,
            labels: &labels,
            weights: &weights,
            theta,
            curve: &curve,
            info_gain: ig,
            split_entropy: se,
        };
        let a = delta_node_bootstrap(&ctx, Criterion::Gini, 42);
        let b = delta_node_bootstrap(&ctx, Criterion::Gini, 42);
        assert_eq!(a, b);
        assert!(a > 0.0, "noisy threshold should have positive spread");
    }

    #[test]
    fn margin_nearest_cross_class() {
        // values [1A, 2A, 3B, 5A, 6B, 7B] around theta = 4
        let column = [1.0, 2.0, 3.0, 5.0, 6.0, 7.0];
        let labels = [0, 0, 1, 0, 1, 1];
        let weights = [1.0; 6];
        let c = curve(vec![4.0], vec![0.2]);
        let ctx = ctx_with_curve(&column, &labels, &weights, 4.0, &c);
        assert_eq!(delta_margin(&ctx, false), 1.0);
    }

    #[test]
    fn margin_clean_split_half_gap_fallback() {
        let column = [1.0, 2.0, 3.0, 5.0, 6.0, 7.0];
        let labels = [0, 0, 0, 1, 1, 1];
        let weights = [1.0; 6];
        let c = curve(vec![4.0], vec![0.5]);
        let ctx = ctx_with_curve(&column, &labels, &weights, 4.0, &c);
        assert_eq!(delta_margin(&ctx, false), 1.0);
        assert_eq!(delta_margin(&ctx, true), 2.0);
    }

    #[test]
    fn margin_single_class_side_uses_fallback() {
        let column = [1.0, 2.0, 6.0, 7.0];
        let labels = [0, 0, 1, 1];
        let weights = [1.0; 4];
        let c = curve(vec![4.0], vec![0.5]);
        let ctx = ctx_with_curve(&column, &labels, &weights, 4.0, &c);
        assert_eq!(delta_margin(&ctx, false), 2.0); // (6 - 2) / 2
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_delta(10.0, 8.0), 2.0);
        assert_eq!(clamp_delta(1.0, 8.0), 1.0);
        assert_eq!(clamp_delta(3.0, 0.0), 0.0);
    }

    #[test]
    fn margin_shrinks_with_sample_size() {
        // Two overlapping Gaussians: the nearest cross-class example moves
        // toward the threshold as the node grows.
        let median_root_margin = |n: usize| {
            let mut deltas: Vec<f64> = (0..10)
                .map(|seed| {
                    let normal0 = Normal::new(0.0, 1.0).unwrap();
                    let normal1 = Normal::new(1.0, 1.0).unwrap();
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut column = Vec::with_capacity(n);
                    let mut labels = Vec::with_capacity(n);
                    for i in 0..n {
                        let y = i % 2;
                        let x = if y == 0 {
                            normal0.sample(&mut rng)
                        } else {
                            normal1.sample(&mut rng)
                        };
                        column.push(x);
                        labels.push(y);
                    }
                    let weights = vec![1.0; n];
                    let (theta, curve, ig, se) = split_context(&column, &labels);
                    let ctx = NodeContext {
                        column: &column,
                        labels: &labels,
                        weights: &weights,
                        theta,
                        curve: &curve,
                        info_gain: ig,
                        split_entropy: se,
                    };
                    delta_margin(&ctx, false)
                })
                .collect();
            deltas.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            deltas[deltas.len() / 2]
        };
        assert!(median_root_margin(2000) < median_root_margin(100));
    }

    fn scale_context(
        ctx_parts: &(Vec<f64>, Vec<usize>, Vec<f64>, f64, QualityCurve, f64, f64),
        s: f64,
        c: f64,
    ) -> (Vec<f64>, Vec<usize>, Vec<f64>, f64, QualityCurve, f64, f64) {
        let (column, labels, weights, theta, curve, ig, se) = ctx_parts;
        (
            column.iter().map(|x| x * s + c).collect(),
            labels.clone(),
            weights.clone(),
            theta * s + c,
            QualityCurve {
                thresholds: curve.thresholds.iter().map(|t| t * s + c).collect(),
                scores: curve.scores.clone(),
                best_index: curve.best_index,
            },
            *ig,
            *se,
        )
    }

    fn all_deltas(
        parts: &(Vec<f64>, Vec<usize>, Vec<f64>, f64, QualityCurve, f64, f64),
    ) -> [f64; 5] {
        let ctx = NodeContext {
            column: &parts.0,
            labels: &parts.1,
            weights: &parts.2,
            theta: parts.3,
            curve: &parts.4,
            info_gain: parts.5,
            split_entropy: parts.6,
        };
        [
            delta_quality_plateau(&ctx, 0.05),
            delta_class_overlap(&ctx, 0.10),
            delta_gain_ratio(&ctx, 0.10),
            delta_node_bootstrap(&ctx, Criterion::Gini, 42),
            delta_margin(&ctx, false),
        ]
    }

    proptest! {
        #[test]
        fn estimators_are_non_negative_and_clamped(seed in 0u64..300) {
            let data = crate::data::gen_two_moons(50, 0.4, seed);
            let rows: Vec<usize> = (0..data.n_rows()).collect();
            let Some(choice) = best_split(&data, &rows, Criterion::Gini) else {
                return Ok(());
            };
            let column = data.column_at(choice.feature, &rows);
            let labels = data.labels_at(&rows);
            let weights = data.weights_at(&rows);
            let ctx = NodeContext {
                column: &column,
                labels: &labels,
                weights: &weights,
                theta: choice.theta,
                curve: &choice.curve,
                info_gain: choice.info_gain,
                split_entropy: choice.split_entropy,
            };
            for method in [
                DeltaMethod::quality_plateau(),
                DeltaMethod::class_overlap(),
                DeltaMethod::gain_ratio(),
                DeltaMethod::node_bootstrap(),
                DeltaMethod::margin(),
                DeltaMethod::zero(),
            ] {
                let d = compute_delta(&ctx, &method, Criterion::Gini, seed);
                prop_assert!(d >= 0.0);
                prop_assert!(d <= 0.25 * ctx.column_range() + 1e-15);
            }
        }

        #[test]
        fn scale_equivariance_and_translation_invariance(seed in 0u64..150) {
            let data = crate::data::gen_two_moons(40, 0.35, seed);
            let rows: Vec<usize> = (0..data.n_rows()).collect();
            let Some(choice) = best_split(&data, &rows, Criterion::Gini) else {
                return Ok(());
            };
            let parts = (
                data.column_at(choice.feature, &rows),
                data.labels_at(&rows),
                data.weights_at(&rows),
                choice.theta,
                choice.curve.clone(),
                choice.info_gain,
                choice.split_entropy,
            );
            let base = all_deltas(&parts);

            // power-of-two scaling is exact in floating point
            let doubled = all_deltas(&scale_context(&parts, 2.0, 0.0));
            for (b, d) in base.iter().zip(&doubled) {
                prop_assert_eq!(2.0 * b, *d);
            }

            let scaled = all_deltas(&scale_context(&parts, 3.7, 0.0));
            for (b, d) in base.iter().zip(&scaled) {
                prop_assert!((3.7 * b - d).abs() <= 1e-9 * (1.0 + d.abs()));
            }

            let shifted = all_deltas(&scale_context(&parts, 1.0, 11.25));
            for (b, d) in base.iter().zip(&shifted) {
                prop_assert!((b - d).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }
    }
}
