//! All five zone half-width estimators applied to the same split node.
//!
//! The node holds two overlapping 1-D Gaussian classes; each estimator
//! reads a different signal from the split statistics, so the half-widths
//! differ — that spread is the point.
//!
//! ```text
//! cargo run --release -p tritree --example delta_methods
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use tritree::delta::{
    clamp_delta, delta_class_overlap, delta_gain_ratio, delta_margin, delta_node_bootstrap,
    delta_quality_plateau, NodeContext,
};
use tritree::splitter::{best_split, Criterion};
use tritree::Dataset;

fn main() -> tritree::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let lo = Normal::new(5.0, 1.5).unwrap();
    let hi = Normal::new(9.0, 1.5).unwrap();
    let n = 300;
    let mut column = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        column.push(if class == 0 {
            lo.sample(&mut rng)
        } else {
            hi.sample(&mut rng)
        });
        labels.push(class);
    }

    let data = Dataset::from_parts(column.clone(), 1, labels.clone())?;
    let rows: Vec<usize> = (0..n).collect();
    let choice = best_split(&data, &rows, Criterion::Gini).expect("classes are separable enough");
    println!(
        "split node: n = {n}, theta* = {:.3}, gain = {:.4}, IG = {:.4} bits, H_split = {:.4} bits\n",
        choice.theta, choice.gain, choice.info_gain, choice.split_entropy
    );

    let weights = vec![1.0; n];
    let ctx = NodeContext {
        column: &column,
        labels: &labels,
        weights: &weights,
        theta: choice.theta,
        curve: &choice.curve,
        info_gain: choice.info_gain,
        split_entropy: choice.split_entropy,
    };
    let range = ctx.column_range();
    println!(
        "column range {range:.3}, clamp ceiling {:.3}\n",
        0.25 * range
    );

    let estimates = [
        ("quality_plateau", delta_quality_plateau(&ctx, 0.05)),
        ("class_overlap", delta_class_overlap(&ctx, 0.10)),
        ("gain_ratio", delta_gain_ratio(&ctx, 0.10)),
        (
            "node_bootstrap",
            delta_node_bootstrap(&ctx, Criterion::Gini, 42),
        ),
        ("margin", delta_margin(&ctx, false)),
    ];
    println!("{:<16} {:>9} {:>9}  zone", "method", "raw", "clamped");
    for (name, raw) in estimates {
        let clamped = clamp_delta(raw, range);
        println!(
            "{name:<16} {raw:>9.4} {clamped:>9.4}  [{:.3}, {:.3}]",
            ctx.theta - clamped,
            ctx.theta + clamped
        );
    }
    Ok(())
}
