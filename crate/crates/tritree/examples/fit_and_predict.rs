//! Fit a ternary tree on the two-moons toy data and inspect predictions.
//!
//! Every instance gets a class; points whose path crossed an uncertainty
//! zone carry an `Undec` verdict instead of `True`.
//!
//! ```text
//! cargo run --release -p tritree --example fit_and_predict
//! ```

use tritree::{fit, predict_probabilistic, Architecture, DeltaMethod, FitParams, TernaryValue};

fn main() -> tritree::Result<()> {
    let data = tritree::data::gen_two_moons(300, 0.25, 42);
    let params = FitParams::new(DeltaMethod::margin(), Architecture::BinaryTernary);
    let tree = fit(&data, &params)?;
    println!(
        "fitted: depth {}, {} nodes, margin deltas, probabilistic routing\n",
        tree.depth(),
        tree.node_count()
    );

    let mut flagged = 0usize;
    for i in 0..data.n_rows() {
        let pred = predict_probabilistic(&tree, data.row(i))?;
        if pred.verdict == TernaryValue::Undec {
            flagged += 1;
            if flagged <= 8 {
                let row = data.row(i);
                println!(
                    "({:+.3}, {:+.3}) -> class {} with p = {:?} [boundary-uncertain]",
                    row[0],
                    row[1],
                    pred.label,
                    pred.probs
                        .probs()
                        .iter()
                        .map(|p| (p * 1000.0).round() / 1000.0)
                        .collect::<Vec<_>>()
                );
            }
        }
    }
    println!(
        "\n{} of {} training points flagged as boundary-uncertain ({:.1}%)",
        flagged,
        data.n_rows(),
        100.0 * flagged as f64 / data.n_rows() as f64
    );
    Ok(())
}
