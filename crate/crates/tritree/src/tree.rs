//! Tree fitting for both architectures.
//!
//! The binary-structure tree grows exactly like standard CART and stores the
//! zone half-width at each split for use at prediction time. The trinary
//! tree adds a physical middle child trained on the examples that fall
//! inside the zone, with the left and right children trained on the examples
//! outside it.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::delta::{compute_delta, DeltaMethod, NodeContext};
use crate::error::{Error, Result};
use crate::splitter::{best_split, Criterion};
use crate::ternary::{zone_classify, ClassDistribution, TernaryValue, ZoneParams};

/// How uncertainty zones are realized in the fitted structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// Binary structure; zones stored per node and applied at prediction.
    BinaryTernary,
    /// A physical middle subtree trained on in-zone examples.
    Trinary,
}

/// Fit configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    pub max_depth: usize,
    pub criterion: Criterion,
    pub delta_method: DeltaMethod,
    pub architecture: Architecture,
    pub seed: u64,
}

impl FitParams {
    pub fn new(delta_method: DeltaMethod, architecture: Architecture) -> Self {
        FitParams {
            max_depth: 4,
            criterion: Criterion::Gini,
            delta_method,
            architecture,
            seed: 42,
        }
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_criterion(mut self, criterion: Criterion) -> Self {
        self.criterion = criterion;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams::new(DeltaMethod::margin(), Architecture::BinaryTernary)
    }
}

/// A node of a fitted tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        dist: ClassDistribution,
        n: usize,
    },
    Split {
        feature: usize,
        theta: f64,
        delta: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
        middle: Option<Box<TreeNode>>,
    },
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split {
                left,
                right,
                middle,
                ..
            } => {
                let mut d = left.depth().max(right.depth());
                if let Some(m) = middle {
                    d = d.max(m.depth());
                }
                d + 1
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split {
                left,
                right,
                middle,
                ..
            } => {
                1 + left.node_count()
                    + right.node_count()
                    + middle.as_ref().map_or(0, |m| m.node_count())
            }
        }
    }
}

/// A fitted tree together with its class schema and the parameters that
/// produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedTree {
    pub architecture: Architecture,
    pub n_classes: usize,
    pub params: FitParams,
    pub root: TreeNode,
}

impl FittedTree {
    /// Canonical serialization; identical trees produce identical text.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ModelParse(e.to_string()))
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }
}

/// Weighted class frequencies, normalized.
pub fn leaf_distribution(
    labels: &[usize],
    weights: &[f64],
    n_classes: usize,
) -> Result<ClassDistribution> {
    let mut counts = vec![0.0; n_classes];
    for (&y, &w) in labels.iter().zip(weights) {
        counts[y] += w;
    }
    ClassDistribution::from_weighted_counts(&counts)
}

struct Grower<'a> {
    data: &'a Dataset,
    params: &'a FitParams,
    next_node_id: u64,
}

impl Grower<'_> {
    fn grow(&mut self, rows: &[usize], depth: usize) -> Result<TreeNode> {
        let node_id = self.next_node_id;
        self.next_node_id += 1;

        let labels = self.data.labels_at(rows);
        let weights = self.data.weights_at(rows);
        let dist = leaf_distribution(&labels, &weights, self.data.n_classes())?;
        let pure = labels.windows(2).all(|w| w[0] == w[1]);
        if depth >= self.params.max_depth || rows.len() < 2 || pure {
            return Ok(TreeNode::Leaf {
                dist,
                n: rows.len(),
            });
        }
        let Some(choice) = best_split(self.data, rows, self.params.criterion) else {
            return Ok(TreeNode::Leaf {
                dist,
                n: rows.len(),
            });
        };

        // The half-width is always computed on the full node, before any
        // zone examples are removed.
        let column = self.data.column_at(choice.feature, rows);
        let ctx = NodeContext {
            column: &column,
            labels: &labels,
            weights: &weights,
            theta: choice.theta,
            curve: &choice.curve,
            info_gain: choice.info_gain,
            split_entropy: choice.split_entropy,
        };
        let delta = compute_delta(
            &ctx,
            &self.params.delta_method,
            self.params.criterion,
            self.params.seed.wrapping_add(node_id),
        );

        match self.params.architecture {
            Architecture::BinaryTernary => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| self.data.feature(i, choice.feature) <= choice.theta);
                let left = self.grow(&left_rows, depth + 1)?;
                let right = self.grow(&right_rows, depth + 1)?;
                Ok(TreeNode::Split {
                    feature: choice.feature,
                    theta: choice.theta,
                    delta,
                    left: Box::new(left),
                    right: Box::new(right),
                    middle: None,
                })
            }
            Architecture::Trinary => {
                let zone = ZoneParams::new(choice.theta, delta);
                let mut left_rows = Vec::new();
                let mut middle_rows = Vec::new();
                let mut right_rows = Vec::new();
                for &i in rows {
                    match zone_classify(self.data.feature(i, choice.feature), &zone) {
                        TernaryValue::False => left_rows.push(i),
                        TernaryValue::Undec => middle_rows.push(i),
                        TernaryValue::True => right_rows.push(i),
                    }
                }
                debug_assert_eq!(
                    left_rows.len() + middle_rows.len() + right_rows.len(),
                    rows.len()
                );
                let left = if left_rows.is_empty() {
                    // zone swallowed this side; fall back to the parent's
                    // distribution so prediction stays total
                    TreeNode::Leaf {
                        dist: dist.clone(),
                        n: 0,
                    }
                } else {
                    self.grow(&left_rows, depth + 1)?
                };
                let middle = if middle_rows.is_empty() {
                    None
                } else {
                    Some(Box::new(self.grow(&middle_rows, depth + 1)?))
                };
                let right = if right_rows.is_empty() {
                    TreeNode::Leaf {
                        dist: dist.clone(),
                        n: 0,
                    }
                } else {
                    self.grow(&right_rows, depth + 1)?
                };
                Ok(TreeNode::Split {
                    feature: choice.feature,
                    theta: choice.theta,
                    delta,
                    left: Box::new(left),
                    right: Box::new(right),
                    middle,
                })
            }
        }
    }
}

/// Fit a tree by recursive greedy growth.
///
/// Growth stops at `max_depth`, on pure nodes, on nodes with fewer than two
/// samples, and when no split has positive gain.
pub fn fit(data: &Dataset, params: &FitParams) -> Result<FittedTree> {
    if data.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if data.n_classes() < 2 {
        return Err(Error::TooFewClasses(data.n_classes()));
    }
    params.delta_method.validate()?;
    let rows: Vec<usize> = (0..data.n_rows()).collect();
    let mut grower = Grower {
        data,
        params,
        next_node_id: 0,
    };
    let root = grower.grow(&rows, 0)?;
    Ok(FittedTree {
        architecture: params.architecture,
        n_classes: data.n_classes(),
        params: params.clone(),
        root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_two_moons;
    use crate::delta::DeltaKind;

    fn dataset_1d(column: &[f64], labels: &[usize]) -> Dataset {
        Dataset::from_parts(column.to_vec(), 1, labels.to_vec()).unwrap()
    }

    #[test]
    fn depth_zero_gives_prior_leaf() {
        let data = dataset_1d(&[1.0, 2.0, 3.0], &[0, 0, 1]);
        let params = FitParams::default().with_max_depth(0);
        let tree = fit(&data, &params).unwrap();
        match &tree.root {
            TreeNode::Leaf { dist, n } => {
                assert_eq!(*n, 3);
                assert_eq!(dist.probs(), &[2.0 / 3.0, 1.0 / 3.0]);
            }
            other => panic!("expected leaf, got {other:?}"),
        }
    }

    #[test]
    fn separable_margin_fit() {
        let data = dataset_1d(&[1.0, 2.0, 5.0, 6.0], &[0, 0, 1, 1]);
        let params = FitParams::default();
        let tree = fit(&data, &params).unwrap();
        match &tree.root {
            TreeNode::Split {
                theta,
                delta,
                left,
                right,
                middle,
                ..
            } => {
                assert_eq!(*theta, 3.5);
                // the margin fallback gives half the straddling gap, 1.5,
                // which the 25%-of-range rule then caps at 1.25
                assert_eq!(*delta, 1.25);
                assert!(middle.is_none());
                for (child, class) in [(left, 0usize), (right, 1usize)] {
                    match child.as_ref() {
                        TreeNode::Leaf { dist, n } => {
                            assert_eq!(*n, 2);
                            assert_eq!(dist.probs()[class], 1.0);
                        }
                        other => panic!("expected pure leaf, got {other:?}"),
                    }
                }
            }
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn single_class_dataset_is_depth_zero_leaf() {
        let mut data = dataset_1d(&[1.0, 2.0, 3.0], &[0, 0, 0]);
        data.class_names = vec!["a".into(), "b".into()];
        let tree = fit(&data, &FitParams::default()).unwrap();
        assert!(tree.root.is_leaf());
    }

    #[test]
    fn one_class_schema_is_rejected() {
        let data = dataset_1d(&[1.0, 2.0, 3.0], &[0, 0, 0]);
        assert!(matches!(
            fit(&data, &FitParams::default()),
            Err(Error::TooFewClasses(1))
        ));
    }

    #[test]
    fn leaf_distribution_respects_weights() {
        let d = leaf_distribution(&[0, 0, 1], &[1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(d.probs(), &[2.0 / 3.0, 1.0 / 3.0]);
        let d = leaf_distribution(&[0, 0, 1], &[0.0, 0.0, 1.0], 2).unwrap();
        assert_eq!(d.probs(), &[0.0, 1.0]);
        let d = leaf_distribution(&[1], &[2.0], 2).unwrap();
        assert_eq!(d.probs(), &[0.0, 1.0]);
        assert!(leaf_distribution(&[0], &[0.0], 2).is_err());
    }

    #[test]
    fn depth_bound_holds() {
        for seed in 0..5 {
            let data = gen_two_moons(120, 0.35, seed);
            for arch in [Architecture::BinaryTernary, Architecture::Trinary] {
                let params = FitParams::new(DeltaMethod::margin(), arch).with_max_depth(3);
                let tree = fit(&data, &params).unwrap();
                assert!(tree.depth() <= 3);
            }
        }
    }

    #[test]
    fn trinary_partitions_training_rows() {
        // walk the fitted tree re-deriving each node's training subset and
        // check the three-way partition at every split
        fn check(node: &TreeNode, data: &Dataset, rows: &[usize]) {
            let TreeNode::Split {
                feature,
                theta,
                delta,
                left,
                right,
                middle,
            } = node
            else {
                return;
            };
            let zone = ZoneParams::new(*theta, *delta);
            let mut parts: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
            for &i in rows {
                match zone_classify(data.feature(i, *feature), &zone) {
                    TernaryValue::False => parts[0].push(i),
                    TernaryValue::Undec => parts[1].push(i),
                    TernaryValue::True => parts[2].push(i),
                }
            }
            assert_eq!(parts[0].len() + parts[1].len() + parts[2].len(), rows.len());
            if parts[1].is_empty() {
                assert!(middle.is_none());
            } else {
                assert!(middle.is_some());
                check(middle.as_ref().unwrap(), data, &parts[1]);
            }
            if !parts[0].is_empty() {
                check(left, data, &parts[0]);
            }
            if !parts[2].is_empty() {
                check(right, data, &parts[2]);
            }
        }

        for seed in 0..5 {
            let data = gen_two_moons(150, 0.4, seed);
            let params = FitParams::new(DeltaMethod::class_overlap(), Architecture::Trinary);
            let tree = fit(&data, &params).unwrap();
            let rows: Vec<usize> = (0..data.n_rows()).collect();
            check(&tree.root, &data, &rows);
        }
    }

    #[test]
    fn middle_only_in_trinary() {
        fn no_middle(node: &TreeNode) -> bool {
            match node {
                TreeNode::Leaf { .. } => true,
                TreeNode::Split {
                    left,
                    right,
                    middle,
                    ..
                } => middle.is_none() && no_middle(left) && no_middle(right),
            }
        }
        let data = gen_two_moons(100, 0.4, 1);
        let tree = fit(
            &data,
            &FitParams::new(DeltaMethod::class_overlap(), Architecture::BinaryTernary),
        )
        .unwrap();
        assert!(no_middle(&tree.root));
    }

    #[test]
    fn fit_is_deterministic() {
        let data = gen_two_moons(140, 0.3, 3);
        for kind in [
            DeltaKind::QualityPlateau,
            DeltaKind::ClassOverlap,
            DeltaKind::GainRatio,
            DeltaKind::NodeBootstrap,
            DeltaKind::Margin,
        ] {
            for arch in [Architecture::BinaryTernary, Architecture::Trinary] {
                let params = FitParams::new(DeltaMethod::new(kind), arch);
                let a = fit(&data, &params).unwrap();
                let b = fit(&data, &params).unwrap();
                assert_eq!(a.to_json(), b.to_json(), "{kind:?}/{arch:?}");
            }
        }
    }

    #[test]
    fn json_round_trip_is_identity() {
        let data = gen_two_moons(80, 0.3, 9);
        let tree = fit(
            &data,
            &FitParams::new(DeltaMethod::margin(), Architecture::Trinary),
        )
        .unwrap();
        let text = tree.to_json();
        let parsed = FittedTree::from_json(&text).unwrap();
        assert_eq!(parsed, tree);
        assert_eq!(parsed.to_json(), text);
    }

    #[test]
    fn delta_stored_within_clamp() {
        fn check(node: &TreeNode) {
            if let TreeNode::Split {
                delta,
                left,
                right,
                middle,
                ..
            } = node
            {
                assert!(*delta >= 0.0);
                check(left);
                check(right);
                if let Some(m) = middle {
                    check(m);
                }
            }
        }
        for kind in [
            DeltaKind::GainRatio,
            DeltaKind::Margin,
            DeltaKind::ClassOverlap,
        ] {
            let data = gen_two_moons(120, 0.45, 5);
            let tree = fit(
                &data,
                &FitParams::new(DeltaMethod::new(kind), Architecture::BinaryTernary),
            )
            .unwrap();
            check(&tree.root);
        }
    }
}
