//! Ternary decision trees with locally-adaptive uncertainty zones.
//!
//! A CART split routes every instance hard left or hard right, assigning the
//! same confidence to a point far from the threshold and to one sitting on
//! it. This crate augments each split with an uncertainty zone
//! `[theta - delta, theta + delta]` whose half-width `delta` is estimated
//! per node from statistics the split search already produced. Instances
//! inside a zone still receive a class prediction — blended from both child
//! subtrees or routed through a dedicated middle branch — and carry an
//! `Undec` verdict so downstream consumers can treat them differently.
//!
//! # Modules
//!
//! - [`ternary`] — three-valued verdicts, Kleene conjunction, zone
//!   classification, class distributions
//! - [`splitter`] — CART split finding and quality curves
//! - [`delta`] — the five zone half-width estimators and the clamp rule
//! - [`tree`] — fitting the binary-structure and trinary architectures
//! - [`baseline`] — a self-contained reference binary CART
//! - [`predict`] — probabilistic, hard-middle, and deferred routing
//! - [`eval`] — decided accuracy, boundary-uncertain rate, macro-F1,
//!   efficiency, U/B ratio, Wilcoxon signed-rank, win/tie/loss
//! - [`data`] — CSV ingestion, standardization, stratified k-fold,
//!   synthetic generators with Bayes-error oracles
//! - [`bench`] — the cross-validated benchmark runner and tree export
//!
//! # Quick start
//!
//! ```
//! use tritree::{fit, predict_probabilistic, Architecture, DeltaMethod, FitParams};
//!
//! let data = tritree::data::gen_two_moons(200, 0.25, 42);
//! let params = FitParams::new(DeltaMethod::margin(), Architecture::BinaryTernary);
//! let tree = fit(&data, &params).unwrap();
//! let pred = predict_probabilistic(&tree, data.row(0)).unwrap();
//! println!("class {} (verdict {:?})", pred.label, pred.verdict);
//! ```
//!
//! # Examples
//!
//! Each major capability has a runnable example under `examples/`:
//!
//! ```text
//! cargo run --release -p tritree --example fit_and_predict
//! cargo run --release -p tritree --example delta_methods
//! cargo run --release -p tritree --example routing_modes
//! cargo run --release -p tritree --example cross_validation
//! cargo run --release -p tritree --example breiman_suite
//! cargo run --release -p tritree --example export_dot
//! cargo run --release -p tritree --example bayes_error
//! ```
//!
//! The `bench` binary wraps the benchmark runner for the command line; see
//! the crate README.

pub mod baseline;
pub mod bench;
pub mod data;
pub mod delta;
pub mod error;
pub mod eval;
pub mod predict;
pub mod splitter;
pub mod ternary;
pub mod tree;

pub use baseline::BinaryCart;
pub use data::{Dataset, FoldPlan, GeneratorId, Standardizer};
pub use delta::{DeltaKind, DeltaMethod, NodeContext};
pub use error::{Error, Result};
pub use eval::{MetricsReport, PairedResult, WilcoxonResult};
pub use predict::{
    predict_dataset, predict_deferred, predict_hard_middle, predict_probabilistic, predict_row,
    Prediction, RoutingMode,
};
pub use splitter::{Criterion, QualityCurve, SplitChoice};
pub use ternary::{ternary_and, zone_classify, ClassDistribution, TernaryValue, ZoneParams};
pub use tree::{fit, Architecture, FitParams, FittedTree, TreeNode};
