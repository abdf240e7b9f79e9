//! The synthetic benchmark suite with known Bayes errors.
//!
//! Runs margin, node-bootstrap, and quality-plateau (probabilistic routing)
//! on twonorm, ringnorm, and waveform, and prints the aggregate table with
//! the U/B diagnostic (boundary-uncertain rate over Bayes error). A U/B
//! near 1 means the flagging rate matches the theoretically ambiguous
//! fraction; large values mean over-flagging.
//!
//! Takes a minute or two; build with `--release`.
//!
//! ```text
//! cargo run --release -p tritree --example breiman_suite
//! ```

use tritree::bench::{render_text_table, run_benchmark, BenchConfig};

fn main() -> tritree::Result<()> {
    let config = BenchConfig::parse(
        "\
seed = 42
k_folds = 5
max_depth = 4
dataset = twonorm gen:twonorm:7400
dataset = ringnorm gen:ringnorm:7400
dataset = waveform gen:waveform:5000
method = margin:prob
method = node_bootstrap:prob
method = quality_plateau:prob
",
    )?;
    let report = run_benchmark(&config)?;
    print!("{}", render_text_table(&report));
    Ok(())
}
