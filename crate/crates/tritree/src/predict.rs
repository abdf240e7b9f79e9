//! Prediction with verdict tracking.
//!
//! Three routing modes share the zone semantics of [`crate::ternary`]:
//!
//! - **probabilistic**: inside a zone, both children are evaluated and their
//!   probability vectors blended by distance weights;
//! - **hard middle**: single-path descent through a trinary tree, taking the
//!   physical middle branch inside a zone;
//! - **deferred**: blends only at the first zone on the path, with plain
//!   binary routing inside both child subtrees.
//!
//! Every instance receives a class prediction. The verdict qualifies it:
//! `True` when no uncertainty zone was traversed, `Undec` otherwise. There
//! is no `False` verdict and no abstention.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::ternary::{zone_classify, ClassDistribution, TernaryValue, ZoneParams};
use crate::tree::{Architecture, FittedTree, TreeNode};

/// Prediction mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingMode {
    Probabilistic,
    HardMiddle,
    Deferred,
}

impl RoutingMode {
    pub fn name(self) -> &'static str {
        match self {
            RoutingMode::Probabilistic => "prob",
            RoutingMode::HardMiddle => "hard",
            RoutingMode::Deferred => "deferred",
        }
    }

    pub fn required_architecture(self) -> Architecture {
        match self {
            RoutingMode::Probabilistic | RoutingMode::Deferred => Architecture::BinaryTernary,
            RoutingMode::HardMiddle => Architecture::Trinary,
        }
    }
}

/// A class-probability vector, the argmax label, and the ternary verdict
/// (restricted to `True` and `Undec`).
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub probs: ClassDistribution,
    pub verdict: TernaryValue,
    pub label: usize,
}

impl Prediction {
    fn from_parts(probs: ClassDistribution, zone_entered: bool) -> Self {
        let label = probs.argmax();
        Prediction {
            probs,
            verdict: if zone_entered {
                TernaryValue::Undec
            } else {
                TernaryValue::True
            },
            label,
        }
    }

    pub fn is_decided(&self) -> bool {
        self.verdict == TernaryValue::True
    }
}

/// Blend weights for a value inside the zone: `w_left` shrinks linearly from
/// 1 at the lower edge to 0 at the upper edge, and `w_left + w_right = 1`.
///
/// Panics when called outside the zone or with a zero half-width.
pub fn blend_weights(x: f64, theta: f64, delta: f64) -> (f64, f64) {
    assert!(
        delta > 0.0 && theta - delta < x && x <= theta + delta,
        "blend_weights requires theta - delta < x <= theta + delta with delta > 0"
    );
    let w_left = (theta + delta - x) / (2.0 * delta);
    (w_left, 1.0 - w_left)
}

fn feature_value(row: &[f64], index: usize) -> Result<f64> {
    row.get(index).copied().ok_or(Error::FeatureOutOfRange {
        index,
        len: row.len(),
    })
}

fn descend_probabilistic(node: &TreeNode, row: &[f64]) -> Result<(ClassDistribution, bool)> {
    match node {
        TreeNode::Leaf { dist, .. } => Ok((dist.clone(), false)),
        TreeNode::Split {
            feature,
            theta,
            delta,
            left,
            right,
            ..
        } => {
            let x = feature_value(row, *feature)?;
            match zone_classify(x, &ZoneParams::new(*theta, *delta)) {
                TernaryValue::False => descend_probabilistic(left, row),
                TernaryValue::True => descend_probabilistic(right, row),
                TernaryValue::Undec => {
                    let (w_left, w_right) = blend_weights(x, *theta, *delta);
                    let (p_left, _) = descend_probabilistic(left, row)?;
                    let (p_right, _) = descend_probabilistic(right, row)?;
                    Ok((
                        ClassDistribution::blend(w_left, &p_left, w_right, &p_right),
                        true,
                    ))
                }
            }
        }
    }
}

/// Recursive descent with distance-weighted blending inside every zone.
pub fn predict_probabilistic(tree: &FittedTree, row: &[f64]) -> Result<Prediction> {
    require_architecture(tree, RoutingMode::Probabilistic)?;
    let (probs, entered) = descend_probabilistic(&tree.root, row)?;
    Ok(Prediction::from_parts(probs, entered))
}

/// Single-path descent through a trinary tree. A zone hit with no middle
/// child routes by the sign of `x - theta` and leaves the verdict unchanged.
pub fn predict_hard_middle(tree: &FittedTree, row: &[f64]) -> Result<Prediction> {
    require_architecture(tree, RoutingMode::HardMiddle)?;
    let mut node = &tree.root;
    let mut entered = false;
    loop {
        match node {
            TreeNode::Leaf { dist, .. } => {
                return Ok(Prediction::from_parts(dist.clone(), entered));
            }
            TreeNode::Split {
                feature,
                theta,
                delta,
                left,
                right,
                middle,
            } => {
                let x = feature_value(row, *feature)?;
                node = match zone_classify(x, &ZoneParams::new(*theta, *delta)) {
                    TernaryValue::False => left,
                    TernaryValue::True => right,
                    TernaryValue::Undec => match middle {
                        Some(m) => {
                            entered = true;
                            m
                        }
                        None => {
                            if x <= *theta {
                                left
                            } else {
                                right
                            }
                        }
                    },
                };
            }
        }
    }
}

fn descend_binary(node: &TreeNode, row: &[f64]) -> Result<ClassDistribution> {
    match node {
        TreeNode::Leaf { dist, .. } => Ok(dist.clone()),
        TreeNode::Split {
            feature,
            theta,
            left,
            right,
            ..
        } => {
            let x = feature_value(row, *feature)?;
            if x <= *theta {
                descend_binary(left, row)
            } else {
                descend_binary(right, row)
            }
        }
    }
}

fn descend_deferred(node: &TreeNode, row: &[f64]) -> Result<(ClassDistribution, bool)> {
    match node {
        TreeNode::Leaf { dist, .. } => Ok((dist.clone(), false)),
        TreeNode::Split {
            feature,
            theta,
            delta,
            left,
            right,
            ..
        } => {
            let x = feature_value(row, *feature)?;
            match zone_classify(x, &ZoneParams::new(*theta, *delta)) {
                TernaryValue::False => descend_deferred(left, row),
                TernaryValue::True => descend_deferred(right, row),
                TernaryValue::Undec => {
                    let (w_left, w_right) = blend_weights(x, *theta, *delta);
                    let p_left = descend_binary(left, row)?;
                    let p_right = descend_binary(right, row)?;
                    Ok((
                        ClassDistribution::blend(w_left, &p_left, w_right, &p_right),
                        true,
                    ))
                }
            }
        }
    }
}

/// Blend at the first zone only; both child subtrees are resolved with pure
/// binary routing.
pub fn predict_deferred(tree: &FittedTree, row: &[f64]) -> Result<Prediction> {
    require_architecture(tree, RoutingMode::Deferred)?;
    let (probs, entered) = descend_deferred(&tree.root, row)?;
    Ok(Prediction::from_parts(probs, entered))
}

fn require_architecture(tree: &FittedTree, mode: RoutingMode) -> Result<()> {
    let expected = mode.required_architecture();
    if tree.architecture != expected {
        return Err(Error::ArchitectureMismatch {
            mode,
            expected,
            actual: tree.architecture,
        });
    }
    Ok(())
}

/// Predict one row in the given mode.
pub fn predict_row(tree: &FittedTree, row: &[f64], mode: RoutingMode) -> Result<Prediction> {
    match mode {
        RoutingMode::Probabilistic => predict_probabilistic(tree, row),
        RoutingMode::HardMiddle => predict_hard_middle(tree, row),
        RoutingMode::Deferred => predict_deferred(tree, row),
    }
}

/// Batch prediction over every row of a dataset.
pub fn predict_dataset(
    tree: &FittedTree,
    data: &Dataset,
    mode: RoutingMode,
) -> Result<Vec<Prediction>> {
    (0..data.n_rows())
        .map(|i| predict_row(tree, data.row(i), mode))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_two_moons;
    use crate::delta::DeltaMethod;
    use crate::ternary::ternary_and;
    use crate::tree::{fit, FitParams};

    fn leaf(p: Vec<f64>, n: usize) -> Box<TreeNode> {
        Box::new(TreeNode::Leaf {
            dist: ClassDistribution::new(p).unwrap(),
            n,
        })
    }

    fn depth_one_tree(theta: f64, delta: f64) -> FittedTree {
        FittedTree {
            architecture: Architecture::BinaryTernary,
            n_classes: 2,
            params: FitParams::default(),
            root: TreeNode::Split {
                feature: 0,
                theta,
                delta,
                left: leaf(vec![1.0, 0.0], 5),
                right: leaf(vec![0.0, 1.0], 5),
                middle: None,
            },
        }
    }

    #[test]
    fn blend_weight_examples() {
        assert_eq!(blend_weights(0.0, 0.0, 1.0), (0.5, 0.5));
        assert_eq!(blend_weights(1.0, 0.0, 1.0), (0.0, 1.0));
        assert_eq!(blend_weights(-1.0, 0.0, 2.0), (0.75, 0.25));
    }

    #[test]
    #[should_panic(expected = "blend_weights requires")]
    fn blend_outside_zone_panics() {
        blend_weights(5.0, 0.0, 1.0);
    }

    #[test]
    fn probabilistic_depth_one() {
        let tree = depth_one_tree(0.0, 1.0);
        let p = predict_probabilistic(&tree, &[-2.0]).unwrap();
        assert_eq!(p.probs.probs(), &[1.0, 0.0]);
        assert_eq!(p.verdict, TernaryValue::True);
        assert_eq!(p.label, 0);

        let p = predict_probabilistic(&tree, &[0.0]).unwrap();
        assert_eq!(p.probs.probs(), &[0.5, 0.5]);
        assert_eq!(p.verdict, TernaryValue::Undec);
        assert_eq!(p.label, 0, "argmax tie goes to the lowest class");

        let p = predict_probabilistic(&tree, &[0.5]).unwrap();
        assert_eq!(p.probs.probs(), &[0.25, 0.75]);
        assert_eq!(p.label, 1);
        assert_eq!(p.verdict, TernaryValue::Undec);
    }

    #[test]
    fn upper_zone_edge_still_flags() {
        let tree = depth_one_tree(0.0, 1.0);
        let p = predict_probabilistic(&tree, &[1.0]).unwrap();
        assert_eq!(p.probs.probs(), &[0.0, 1.0]);
        assert_eq!(p.verdict, TernaryValue::Undec);
        let p = predict_probabilistic(&tree, &[1.0 + 1e-9]).unwrap();
        assert_eq!(p.verdict, TernaryValue::True);
    }

    #[test]
    fn hard_middle_routes_through_middle_leaf() {
        let tree = FittedTree {
            architecture: Architecture::Trinary,
            n_classes: 2,
            params: FitParams::new(DeltaMethod::margin(), Architecture::Trinary),
            root: TreeNode::Split {
                feature: 0,
                theta: 0.0,
                delta: 1.0,
                left: leaf(vec![1.0, 0.0], 4),
                right: leaf(vec![0.0, 1.0], 4),
                middle: Some(leaf(vec![0.6, 0.4], 2)),
            },
        };
        let p = predict_hard_middle(&tree, &[0.3]).unwrap();
        assert_eq!(p.probs.probs(), &[0.6, 0.4]);
        assert_eq!(p.verdict, TernaryValue::Undec);

        let p = predict_hard_middle(&tree, &[-3.0]).unwrap();
        assert_eq!(p.label, 0);
        assert_eq!(p.verdict, TernaryValue::True);
    }

    #[test]
    fn hard_middle_zone_without_middle_keeps_verdict() {
        let tree = FittedTree {
            architecture: Architecture::Trinary,
            n_classes: 2,
            params: FitParams::new(DeltaMethod::margin(), Architecture::Trinary),
            root: TreeNode::Split {
                feature: 0,
                theta: 0.0,
                delta: 1.0,
                left: leaf(vec![1.0, 0.0], 4),
                right: leaf(vec![0.0, 1.0], 4),
                middle: None,
            },
        };
        let p = predict_hard_middle(&tree, &[0.3]).unwrap();
        assert_eq!(p.label, 1, "routes by the sign of x - theta");
        assert_eq!(p.verdict, TernaryValue::True);
        let p = predict_hard_middle(&tree, &[-0.3]).unwrap();
        assert_eq!(p.label, 0);
        assert_eq!(p.verdict, TernaryValue::True);
    }

    #[test]
    fn deferred_equals_probabilistic_on_depth_one() {
        let tree = depth_one_tree(2.0, 0.5);
        for x in [-1.0, 1.6, 2.0, 2.2, 2.5, 3.0] {
            let a = predict_probabilistic(&tree, &[x]).unwrap();
            let b = predict_deferred(&tree, &[x]).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mode_architecture_mismatch_errors() {
        let tree = depth_one_tree(0.0, 0.0);
        assert!(matches!(
            predict_hard_middle(&tree, &[0.0]),
            Err(Error::ArchitectureMismatch { .. })
        ));
    }

    #[test]
    fn missing_feature_errors() {
        let tree = depth_one_tree(0.0, 0.5);
        assert!(matches!(
            predict_probabilistic(&tree, &[]),
            Err(Error::FeatureOutOfRange { .. })
        ));
    }

    #[test]
    fn zero_delta_trees_agree_across_modes() {
        let data = gen_two_moons(160, 0.35, 11);
        let binary = fit(
            &data,
            &FitParams::new(DeltaMethod::zero(), Architecture::BinaryTernary),
        )
        .unwrap();
        let trinary = fit(
            &data,
            &FitParams::new(DeltaMethod::zero(), Architecture::Trinary),
        )
        .unwrap();
        for i in 0..data.n_rows() {
            let row = data.row(i);
            let a = predict_probabilistic(&binary, row).unwrap();
            let b = predict_deferred(&binary, row).unwrap();
            let c = predict_hard_middle(&trinary, row).unwrap();
            assert_eq!(a.verdict, TernaryValue::True);
            assert_eq!(a, b);
            assert_eq!(a.label, c.label);
            assert_eq!(c.verdict, TernaryValue::True);
        }
    }

    #[test]
    fn blended_probabilities_sum_to_one() {
        for seed in 0..6 {
            let data = gen_two_moons(150, 0.45, seed);
            let tree = fit(
                &data,
                &FitParams::new(DeltaMethod::class_overlap(), Architecture::BinaryTernary)
                    .with_seed(seed),
            )
            .unwrap();
            for i in 0..data.n_rows() {
                let p = predict_probabilistic(&tree, data.row(i)).unwrap();
                let sum: f64 = p.probs.probs().iter().sum();
                assert!((sum - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn weights_partition_unity_exactly() {
        for i in 0..2000 {
            let delta = 0.5 + (i as f64) * 1e-3;
            let x = -delta + (2.0 * delta) * (i as f64 + 1.0) / 2001.0;
            let (wl, wr) = blend_weights(x, 0.0, delta);
            assert!(wl + wr == 1.0, "wl {wl} + wr {wr} != 1");
            assert!((0.0..=1.0).contains(&wl) && (0.0..=1.0).contains(&wr));
        }
    }

    /// Collect the zone verdicts along every contributing path, mapping the
    /// decisive `False` to `True`, and fold them with Kleene conjunction.
    fn fold_zone_trace(node: &TreeNode, row: &[f64]) -> TernaryValue {
        match node {
            TreeNode::Leaf { .. } => TernaryValue::True,
            TreeNode::Split {
                feature,
                theta,
                delta,
                left,
                right,
                ..
            } => {
                let zone = zone_classify(row[*feature], &ZoneParams::new(*theta, *delta));
                match zone {
                    TernaryValue::False => {
                        ternary_and(TernaryValue::True, fold_zone_trace(left, row))
                    }
                    TernaryValue::True => {
                        ternary_and(TernaryValue::True, fold_zone_trace(right, row))
                    }
                    TernaryValue::Undec => ternary_and(
                        TernaryValue::Undec,
                        ternary_and(fold_zone_trace(left, row), fold_zone_trace(right, row)),
                    ),
                }
            }
        }
    }

    #[test]
    fn verdict_equals_kleene_fold_over_contributing_paths() {
        for seed in 0..8 {
            let data = gen_two_moons(120, 0.4, seed);
            let tree = fit(
                &data,
                &FitParams::new(DeltaMethod::quality_plateau(), Architecture::BinaryTernary),
            )
            .unwrap();
            for i in 0..data.n_rows() {
                let row = data.row(i);
                let pred = predict_probabilistic(&tree, row).unwrap();
                let folded = fold_zone_trace(&tree.root, row);
                assert_eq!(
                    pred.verdict, folded,
                    "flag and fold disagree at row {i} (seed {seed})"
                );
            }
        }
    }
}
