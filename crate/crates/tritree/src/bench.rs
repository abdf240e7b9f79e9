//! Cross-validated benchmark runner.
//!
//! Runs every configured `(delta method, routing)` combination against the
//! reference binary CART on identical stratified folds with fold-local
//! standardization, then aggregates metrics, paired statistics, and the U/B
//! diagnostic for generator-backed datasets with registered Bayes errors.
//!
//! # Config format
//!
//! A flat, line-oriented key/value document. `#` starts a comment; blank
//! lines are ignored; `dataset` and `method` repeat to form lists.
//!
//! ```text
//! seed = 42
//! k_folds = 5
//! max_depth = 4
//! criterion = gini                  # or info_gain
//! node_bootstrap_size_cap = 20000
//!
//! # dataset = <name> gen:<twonorm|ringnorm|waveform>:<n>
//! # dataset = <name> gen:two_moons:<n>:<noise>
//! # dataset = <name> csv:<path>:<label_column>
//! dataset = twonorm gen:twonorm:7400
//! dataset = diabetes csv:data/diabetes.csv:label
//!
//! # method = <kind>:<routing> [epsilon=..] [q=..] [alpha=..] [full_gap]
//! #   kind:    quality_plateau | class_overlap | gain_ratio |
//! #            node_bootstrap | margin | zero
//! #   routing: prob | hard | deferred
//! method = margin:prob
//! method = node_bootstrap:prob
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::BinaryCart;
use crate::data::{
    gen_ringnorm, gen_two_moons, gen_twonorm, gen_waveform, load_csv, registered_bayes_error,
    stratified_kfold, Dataset, GeneratorId, Standardizer,
};
use crate::delta::{DeltaKind, DeltaMethod};
use crate::error::{Error, Result};
use crate::eval::{
    compute_metrics, paired_comparison, MetricsReport, PairedResult, WIN_TIE_LOSS_THRESHOLD,
};
use crate::predict::{predict_dataset, RoutingMode};
use crate::splitter::Criterion;
use crate::tree::{fit, FitParams, FittedTree, TreeNode};

/// Where a benchmark dataset comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Csv { path: PathBuf, label_column: String },
    Generator { id: GeneratorId, n: usize },
    TwoMoons { n: usize, noise: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub source: DataSource,
}

/// One `(delta method, routing)` combination to evaluate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: DeltaMethod,
    pub routing: RoutingMode,
}

impl MethodSpec {
    pub fn new(kind: DeltaKind, routing: RoutingMode) -> Self {
        MethodSpec {
            method: DeltaMethod::new(kind),
            routing,
        }
    }

    /// Stable display label, e.g. `margin/prob`.
    pub fn label(&self) -> String {
        format!("{}/{}", self.method.kind.name(), self.routing.name())
    }
}

/// Full benchmark configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub datasets: Vec<DatasetSpec>,
    pub methods: Vec<MethodSpec>,
    pub k_folds: usize,
    pub max_depth: usize,
    pub seed: u64,
    pub criterion: Criterion,
    pub node_bootstrap_size_cap: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            datasets: Vec::new(),
            methods: Vec::new(),
            k_folds: 5,
            max_depth: 4,
            seed: 42,
            criterion: Criterion::Gini,
            node_bootstrap_size_cap: 20_000,
        }
    }
}

impl BenchConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = BenchConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |message: String| Error::Config {
                line: line_no,
                message,
            };
            match key {
                "seed" => {
                    config.seed = value
                        .parse()
                        .map_err(|_| bad(format!("bad seed {value:?}")))?
                }
                "k_folds" => {
                    config.k_folds = value
                        .parse()
                        .map_err(|_| bad(format!("bad k_folds {value:?}")))?
                }
                "max_depth" => {
                    config.max_depth = value
                        .parse()
                        .map_err(|_| bad(format!("bad max_depth {value:?}")))?
                }
                "node_bootstrap_size_cap" => {
                    config.node_bootstrap_size_cap = value
                        .parse()
                        .map_err(|_| bad(format!("bad node_bootstrap_size_cap {value:?}")))?
                }
                "criterion" => {
                    config.criterion = match value {
                        "gini" => Criterion::Gini,
                        "info_gain" => Criterion::InfoGain,
                        other => return Err(bad(format!("unknown criterion {other:?}"))),
                    }
                }
                "dataset" => config.datasets.push(parse_dataset(value, line_no)?),
                "method" => config.methods.push(parse_method(value, line_no)?),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::InvalidParameter("no datasets configured".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods configured".into()));
        }
        if self.k_folds < 2 {
            return Err(Error::InvalidParameter(format!(
                "k_folds must be at least 2, got {}",
                self.k_folds
            )));
        }
        let mut names: Vec<&str> = self.datasets.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.datasets.len() {
            return Err(Error::InvalidParameter(
                "dataset names must be unique".into(),
            ));
        }
        for m in &self.methods {
            m.method.validate()?;
        }
        Ok(())
    }
}

fn parse_dataset(value: &str, line: usize) -> Result<DatasetSpec> {
    let bad = |message: String| Error::Config { line, message };
    let (name, source_text) = value
        .split_once(char::is_whitespace)
        .ok_or_else(|| bad(format!("expected `<name> <source>`, got {value:?}")))?;
    let source_text = source_text.trim();
    let source = if let Some(rest) = source_text.strip_prefix("gen:") {
        let parts: Vec<&str> = rest.split(':').collect();
        match parts.as_slice() {
            [id, n] if *id == "two_moons" => DataSource::TwoMoons {
                n: n.parse().map_err(|_| bad(format!("bad n {n:?}")))?,
                noise: 0.25,
            },
            [id, n, noise] if *id == "two_moons" => DataSource::TwoMoons {
                n: n.parse().map_err(|_| bad(format!("bad n {n:?}")))?,
                noise: noise
                    .parse()
                    .map_err(|_| bad(format!("bad noise {noise:?}")))?,
            },
            [id, n] => DataSource::Generator {
                id: GeneratorId::from_str(id)?,
                n: n.parse().map_err(|_| bad(format!("bad n {n:?}")))?,
            },
            _ => return Err(bad(format!("bad generator source {source_text:?}"))),
        }
    } else if let Some(rest) = source_text.strip_prefix("csv:") {
        let (path, label) = rest
            .rsplit_once(':')
            .ok_or_else(|| bad(format!("expected csv:<path>:<label_column>, got {rest:?}")))?;
        DataSource::Csv {
            path: PathBuf::from(path),
            label_column: label.to_string(),
        }
    } else {
        return Err(bad(format!(
            "source must start with gen: or csv:, got {source_text:?}"
        )));
    };
    Ok(DatasetSpec {
        name: name.to_string(),
        source,
    })
}

fn parse_method(value: &str, line: usize) -> Result<MethodSpec> {
    let bad = |message: String| Error::Config { line, message };
    let mut tokens = value.split_whitespace();
    let combo = tokens.next().unwrap_or_default();
    let (kind_text, routing_text) = combo
        .split_once(':')
        .ok_or_else(|| bad(format!("expected <kind>:<routing>, got {combo:?}")))?;
    let kind = match kind_text {
        "quality_plateau" => DeltaKind::QualityPlateau,
        "class_overlap" => DeltaKind::ClassOverlap,
        "gain_ratio" => DeltaKind::GainRatio,
        "node_bootstrap" => DeltaKind::NodeBootstrap,
        "margin" => DeltaKind::Margin,
        "zero" => DeltaKind::Zero,
        other => return Err(bad(format!("unknown delta kind {other:?}"))),
    };
    let routing = match routing_text {
        "prob" | "probabilistic" => RoutingMode::Probabilistic,
        "hard" | "hard_middle" => RoutingMode::HardMiddle,
        "deferred" => RoutingMode::Deferred,
        other => return Err(bad(format!("unknown routing {other:?}"))),
    };
    let mut method = DeltaMethod::new(kind);
    for token in tokens {
        if token == "full_gap" {
            method.margin_full_gap = true;
            continue;
        }
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value option, got {token:?}")))?;
        let parsed: f64 = v.parse().map_err(|_| bad(format!("bad value {v:?}")))?;
        match k {
            "epsilon" => method.epsilon = parsed,
            "q" => method.q = parsed,
            "alpha" => method.alpha = parsed,
            other => return Err(bad(format!("unknown method option {other:?}"))),
        }
    }
    Ok(MethodSpec { method, routing })
}

fn load_source(source: &DataSource, seed: u64) -> Result<Dataset> {
    match source {
        DataSource::Csv { path, label_column } => load_csv(path, label_column),
        DataSource::Generator { id, n } => Ok(match id {
            GeneratorId::Twonorm => gen_twonorm(*n, seed),
            GeneratorId::Ringnorm => gen_ringnorm(*n, seed),
            GeneratorId::Waveform => gen_waveform(*n, seed),
        }),
        DataSource::TwoMoons { n, noise } => Ok(gen_two_moons(*n, *noise, seed)),
    }
}

/// One `(dataset, method, fold)` evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldCell {
    pub dataset: String,
    pub method: String,
    pub fold: usize,
    pub metrics: MetricsReport,
    pub baseline_acc: f64,
}

/// Per-(dataset, method) aggregate over folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub dataset: String,
    pub method: String,
    pub dec_acc_mean: f64,
    pub dec_acc_std: f64,
    pub undec_rate_mean: f64,
    pub acc_all_mean: f64,
    pub f1_dec_mean: f64,
    pub baseline_acc_mean: f64,
    /// `(dec_acc_mean - baseline_acc_mean) / undec_rate_mean`; absent when
    /// nothing was flagged.
    pub efficiency: Option<f64>,
    /// `undec_rate_mean / bayes_error` for generator-backed datasets with a
    /// registered Bayes error.
    pub ub_ratio: Option<f64>,
}

/// Per-method summary across datasets, paired against the baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub datasets: usize,
    pub dec_acc_mean: f64,
    pub dec_acc_std: f64,
    pub undec_rate_mean: f64,
    pub acc_all_mean: f64,
    pub baseline_acc_mean: f64,
    /// Mean of the per-dataset efficiency ratios.
    pub efficiency_mean: Option<f64>,
    /// Efficiency of the cross-dataset means.
    pub efficiency_pooled: Option<f64>,
    pub paired: PairedResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub dataset: String,
    /// `None` when the whole dataset was skipped.
    pub method: Option<String>,
    pub reason: String,
}

/// Everything a benchmark run produced. Serialization is deterministic for
/// a fixed config and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub k_folds: usize,
    pub max_depth: usize,
    pub criterion: Criterion,
    pub cells: Vec<FoldCell>,
    pub aggregates: Vec<AggregateRow>,
    pub summaries: Vec<MethodSummary>,
    pub skipped: Vec<SkipRecord>,
}

impl RunReport {
    pub fn aggregate(&self, dataset: &str, method: &str) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.dataset == dataset && a.method == method)
    }

    pub fn summary(&self, method: &str) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

struct FoldData {
    train: Dataset,
    test: Dataset,
    baseline_acc: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let collected: Vec<f64> = values.collect();
    collected.iter().sum::<f64>() / collected.len() as f64
}

fn std_dev(values: &[f64]) -> f64 {
    let m = values.iter().sum::<f64>() / values.len() as f64;
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

fn run_dataset(
    spec: &DatasetSpec,
    config: &BenchConfig,
    cells: &mut Vec<FoldCell>,
    aggregates: &mut Vec<AggregateRow>,
    skipped: &mut Vec<SkipRecord>,
) -> Result<()> {
    let data = load_source(&spec.source, config.seed)?;
    let plan = stratified_kfold(data.labels(), config.k_folds, config.seed)?;

    let folds: Vec<FoldData> = (0..config.k_folds)
        .into_par_iter()
        .map(|f| -> Result<FoldData> {
            let train_rows = plan.train_indices(f);
            let test_rows = plan.test_indices(f);
            let scaler = Standardizer::fit(&data, &train_rows);
            let train = scaler.transform(&data, &train_rows);
            let test = scaler.transform(&data, test_rows);
            let baseline = BinaryCart::fit(&train, config.max_depth, config.criterion)?;
            let all_test: Vec<usize> = (0..test.n_rows()).collect();
            let baseline_acc = baseline.accuracy(&test, &all_test)?;
            Ok(FoldData {
                train,
                test,
                baseline_acc,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let bayes_error = match &spec.source {
        DataSource::Generator { id, .. } => Some(registered_bayes_error(*id)),
        _ => None,
    };

    for mspec in &config.methods {
        let label = mspec.label();
        if mspec.method.kind == DeltaKind::NodeBootstrap
            && data.n_rows() > config.node_bootstrap_size_cap
        {
            skipped.push(SkipRecord {
                dataset: spec.name.clone(),
                method: Some(label),
                reason: format!(
                    "size cap: {} rows exceed node_bootstrap_size_cap {}",
                    data.n_rows(),
                    config.node_bootstrap_size_cap
                ),
            });
            continue;
        }
        let params = FitParams {
            max_depth: config.max_depth,
            criterion: config.criterion,
            delta_method: mspec.method,
            architecture: mspec.routing.required_architecture(),
            seed: config.seed,
        };
        let fold_metrics: Vec<MetricsReport> = folds
            .par_iter()
            .map(|fd| -> Result<MetricsReport> {
                let tree = fit(&fd.train, &params)?;
                let preds = predict_dataset(&tree, &fd.test, mspec.routing)?;
                compute_metrics(&preds, fd.test.labels(), fd.test.n_classes())
            })
            .collect::<Result<Vec<_>>>()?;

        for (f, metrics) in fold_metrics.iter().enumerate() {
            cells.push(FoldCell {
                dataset: spec.name.clone(),
                method: label.clone(),
                fold: f,
                metrics: *metrics,
                baseline_acc: folds[f].baseline_acc,
            });
        }
        let dec: Vec<f64> = fold_metrics.iter().map(|m| m.dec_acc).collect();
        let dec_acc_mean = mean(dec.iter().copied());
        let undec_rate_mean = mean(fold_metrics.iter().map(|m| m.undec_rate));
        let baseline_acc_mean = mean(folds.iter().map(|fd| fd.baseline_acc));
        aggregates.push(AggregateRow {
            dataset: spec.name.clone(),
            method: label,
            dec_acc_mean,
            dec_acc_std: std_dev(&dec),
            undec_rate_mean,
            acc_all_mean: mean(fold_metrics.iter().map(|m| m.acc_all)),
            f1_dec_mean: mean(fold_metrics.iter().map(|m| m.f1_dec)),
            baseline_acc_mean,
            efficiency: (undec_rate_mean > 0.0)
                .then(|| (dec_acc_mean - baseline_acc_mean) / undec_rate_mean),
            ub_ratio: bayes_error.map(|be| undec_rate_mean / be),
        });
    }
    Ok(())
}

/// Run the full benchmark described by `config`.
///
/// A dataset that fails to load (or cannot be folded) aborts that dataset
/// only, recorded in `skipped`; node-bootstrap methods are skipped with a
/// reason on datasets larger than the size cap.
pub fn run_benchmark(config: &BenchConfig) -> Result<RunReport> {
    config.validate()?;
    let mut cells = Vec::new();
    let mut aggregates = Vec::new();
    let mut skipped = Vec::new();

    for spec in &config.datasets {
        if let Err(e) = run_dataset(spec, config, &mut cells, &mut aggregates, &mut skipped) {
            skipped.push(SkipRecord {
                dataset: spec.name.clone(),
                method: None,
                reason: e.to_string(),
            });
        }
    }

    // paired statistics over per-dataset means, in configured method order
    let mut summaries = Vec::new();
    for mspec in &config.methods {
        let label = mspec.label();
        let rows: Vec<&AggregateRow> = aggregates.iter().filter(|a| a.method == label).collect();
        if rows.is_empty() {
            continue;
        }
        let paired_pairs: Vec<(f64, f64)> = rows
            .iter()
            .map(|a| (a.dec_acc_mean, a.baseline_acc_mean))
            .collect();
        let dec: Vec<f64> = rows.iter().map(|a| a.dec_acc_mean).collect();
        let dec_acc_mean = mean(dec.iter().copied());
        let undec_rate_mean = mean(rows.iter().map(|a| a.undec_rate_mean));
        let baseline_acc_mean = mean(rows.iter().map(|a| a.baseline_acc_mean));
        let per_dataset_eta: Vec<f64> = rows.iter().filter_map(|a| a.efficiency).collect();
        summaries.push(MethodSummary {
            method: label,
            datasets: rows.len(),
            dec_acc_mean,
            dec_acc_std: std_dev(&dec),
            undec_rate_mean,
            acc_all_mean: mean(rows.iter().map(|a| a.acc_all_mean)),
            baseline_acc_mean,
            efficiency_mean: (!per_dataset_eta.is_empty())
                .then(|| mean(per_dataset_eta.iter().copied())),
            efficiency_pooled: (undec_rate_mean > 0.0)
                .then(|| (dec_acc_mean - baseline_acc_mean) / undec_rate_mean),
            paired: paired_comparison(&paired_pairs, WIN_TIE_LOSS_THRESHOLD),
        });
    }

    Ok(RunReport {
        seed: config.seed,
        k_folds: config.k_folds,
        max_depth: config.max_depth,
        criterion: config.criterion,
        cells,
        aggregates,
        summaries,
        skipped,
    })
}

/// Tree export format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::InvalidParameter(format!(
                "unknown export format {other:?} (expected dot or json)"
            ))),
        }
    }
}

/// Render a fitted tree as Graphviz DOT or canonical JSON.
pub fn export_tree(tree: &FittedTree, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => tree.to_json(),
        ExportFormat::Dot => export_tree_dot(tree),
    }
}

/// Graphviz DOT rendering: one node per tree node, split nodes labeled with
/// feature, threshold, and half-width; middle edges dashed.
pub fn export_tree_dot(tree: &FittedTree) -> String {
    fn walk(node: &TreeNode, next_id: &mut usize, out: &mut String) -> usize {
        let id = *next_id;
        *next_id += 1;
        match node {
            TreeNode::Leaf { dist, n } => {
                let probs: Vec<String> = dist.probs().iter().map(|p| format!("{p:.3}")).collect();
                let _ = writeln!(
                    out,
                    "  n{id} [shape=box, label=\"n={n}\\n[{}]\"];",
                    probs.join(", ")
                );
            }
            TreeNode::Split {
                feature,
                theta,
                delta,
                left,
                right,
                middle,
            } => {
                let _ = writeln!(
                    out,
                    "  n{id} [shape=box, label=\"f{feature}\\ntheta={theta:.4}\\ndelta={delta:.4}\"];"
                );
                let left_id = walk(left, next_id, out);
                let _ = writeln!(out, "  n{id} -> n{left_id};");
                if let Some(m) = middle {
                    let middle_id = walk(m, next_id, out);
                    let _ = writeln!(out, "  n{id} -> n{middle_id} [style=dashed];");
                }
                let right_id = walk(right, next_id, out);
                let _ = writeln!(out, "  n{id} -> n{right_id};");
            }
        }
        id
    }

    let mut out = String::from("digraph ternary_tree {\n");
    let mut next_id = 0;
    walk(&tree.root, &mut next_id, &mut out);
    out.push_str("}\n");
    out
}

/// Render the per-fold cells as CSV.
pub fn render_csv(report: &RunReport) -> String {
    let mut out = String::from(
        "dataset,method,fold,n,dec_acc,undec_rate,acc_all,f1_dec,acc_undec,no_decided,baseline_acc\n",
    );
    for c in &report.cells {
        let m = &c.metrics;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.dataset,
            c.method,
            c.fold,
            m.n,
            m.dec_acc,
            m.undec_rate,
            m.acc_all,
            m.f1_dec,
            m.acc_undec,
            m.no_decided,
            c.baseline_acc
        );
    }
    out
}

/// Render the aggregates and summaries as a fixed-width text table.
pub fn render_text_table(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "benchmark: {} folds, depth {}, seed {}, criterion {:?}",
        report.k_folds, report.max_depth, report.seed, report.criterion
    );

    let has_ub = report.aggregates.iter().any(|a| a.ub_ratio.is_some());
    let mut datasets: Vec<&str> = Vec::new();
    for a in &report.aggregates {
        if !datasets.contains(&a.dataset.as_str()) {
            datasets.push(&a.dataset);
        }
    }
    for dataset in datasets {
        let _ = writeln!(out, "\n[{dataset}]");
        let _ = write!(
            out,
            "{:<22} {:>8} {:>7} {:>7} {:>8} {:>8} {:>8}",
            "Method", "Dec.Acc", "+-std", "Undec%", "Acc.All", "F1.Dec", "Eff."
        );
        let _ = if has_ub {
            writeln!(out, " {:>6}", "U/B")
        } else {
            writeln!(out)
        };
        let mut baseline_written = false;
        for a in report.aggregates.iter().filter(|a| a.dataset == dataset) {
            if !baseline_written {
                let _ = write!(
                    out,
                    "{:<22} {:>8.4} {:>7} {:>7.1} {:>8.4} {:>8} {:>8}",
                    "cart (baseline)", a.baseline_acc_mean, "-", 0.0, a.baseline_acc_mean, "-", "-"
                );
                let _ = if has_ub {
                    writeln!(out, " {:>6}", "-")
                } else {
                    writeln!(out)
                };
                baseline_written = true;
            }
            let eff = a.efficiency.map_or("-".to_string(), |e| format!("{e:.4}"));
            let _ = write!(
                out,
                "{:<22} {:>8.4} {:>7.4} {:>7.1} {:>8.4} {:>8.4} {:>8}",
                a.method,
                a.dec_acc_mean,
                a.dec_acc_std,
                100.0 * a.undec_rate_mean,
                a.acc_all_mean,
                a.f1_dec_mean,
                eff
            );
            let _ = match a.ub_ratio {
                Some(ub) if has_ub => writeln!(out, " {ub:>6.2}"),
                _ if has_ub => writeln!(out, " {:>6}", "-"),
                _ => writeln!(out),
            };
        }
    }

    if !report.summaries.is_empty() {
        let _ = writeln!(
            out,
            "\n[summary over {} dataset(s)]",
            report.summaries[0].datasets
        );
        let _ = writeln!(
            out,
            "{:<22} {:>8} {:>7} {:>7} {:>8} {:>9} {:>9} {:>8} {:>10}",
            "Method",
            "Dec.Acc",
            "+-std",
            "Undec%",
            "Acc.All",
            "Eff.mean",
            "Eff.pool",
            "W/T/L",
            "Wilcoxon p"
        );
        for s in &report.summaries {
            let fmt_eta = |e: Option<f64>| e.map_or("-".to_string(), |v| format!("{v:.4}"));
            let _ = writeln!(
                out,
                "{:<22} {:>8.4} {:>7.4} {:>7.1} {:>8.4} {:>9} {:>9} {:>8} {:>10.4}",
                s.method,
                s.dec_acc_mean,
                s.dec_acc_std,
                100.0 * s.undec_rate_mean,
                s.acc_all_mean,
                fmt_eta(s.efficiency_mean),
                fmt_eta(s.efficiency_pooled),
                format!("{}/{}/{}", s.paired.wins, s.paired.ties, s.paired.losses),
                s.paired.p_value
            );
        }
    }

    if !report.skipped.is_empty() {
        let _ = writeln!(out, "\n[skipped]");
        for s in &report.skipped {
            let _ = writeln!(
                out,
                "{} {}: {}",
                s.dataset,
                s.method.as_deref().unwrap_or("(all methods)"),
                s.reason
            );
        }
    }
    out
}

/// Write `report.json`, `report.csv`, and `report.txt` into `dir`,
/// creating it if needed. Returns the written paths.
pub fn emit_report(report: &RunReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let entries: [(&str, String); 3] = [
        (
            "report.json",
            serde_json::to_string_pretty(report).expect("report serialization cannot fail"),
        ),
        ("report.csv", render_csv(report)),
        ("report.txt", render_text_table(report)),
    ];
    let mut paths = Vec::new();
    for (name, content) in entries {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Configured (dataset x method) cells must all be accounted for: reported
/// or skipped with a reason.
pub fn check_cell_accounting(config: &BenchConfig, report: &RunReport) -> bool {
    let mut expected = 0usize;
    let mut seen = 0usize;
    for spec in &config.datasets {
        let dataset_skipped = report
            .skipped
            .iter()
            .any(|s| s.dataset == spec.name && s.method.is_none());
        for mspec in &config.methods {
            expected += 1;
            let label = mspec.label();
            let reported = report
                .aggregates
                .iter()
                .any(|a| a.dataset == spec.name && a.method == label);
            let cell_skipped = report
                .skipped
                .iter()
                .any(|s| s.dataset == spec.name && s.method.as_deref() == Some(&label));
            if reported || cell_skipped || dataset_skipped {
                seen += 1;
            }
        }
    }
    expected == seen
}

/// Map method labels to their aggregate rows per dataset.
pub fn aggregates_by_method(report: &RunReport) -> BTreeMap<String, Vec<&AggregateRow>> {
    let mut map: BTreeMap<String, Vec<&AggregateRow>> = BTreeMap::new();
    for a in &report.aggregates {
        map.entry(a.method.clone()).or_default().push(a);
    }
    map
}
