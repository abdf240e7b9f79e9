//! Compare the three routing modes on one train/test split.
//!
//! Probabilistic and deferred routing share a binary-structure tree and
//! differ only on paths that cross several zones; hard-middle routing uses
//! a trinary tree whose middle subtrees were trained on in-zone examples.
//!
//! ```text
//! cargo run --release -p tritree --example routing_modes
//! ```

use tritree::data::{gen_two_moons, stratified_kfold};
use tritree::eval::compute_metrics;
use tritree::{fit, predict_dataset, Architecture, DeltaMethod, FitParams, RoutingMode};

fn main() -> tritree::Result<()> {
    let data = gen_two_moons(600, 0.3, 42);
    let plan = stratified_kfold(data.labels(), 5, 42)?;
    let train = data.subset(&plan.train_indices(0));
    let test = data.subset(plan.test_indices(0));

    let method = DeltaMethod::quality_plateau();
    let binary = fit(&train, &FitParams::new(method, Architecture::BinaryTernary))?;
    let trinary = fit(&train, &FitParams::new(method, Architecture::Trinary))?;

    println!(
        "{:<14} {:>8} {:>8} {:>8} {:>8}",
        "routing", "dec_acc", "undec%", "acc_all", "f1_dec"
    );
    for (label, tree, mode) in [
        ("probabilistic", &binary, RoutingMode::Probabilistic),
        ("deferred", &binary, RoutingMode::Deferred),
        ("hard-middle", &trinary, RoutingMode::HardMiddle),
    ] {
        let preds = predict_dataset(tree, &test, mode)?;
        let m = compute_metrics(&preds, test.labels(), test.n_classes())?;
        println!(
            "{label:<14} {:>8.4} {:>8.1} {:>8.4} {:>8.4}",
            m.dec_acc,
            100.0 * m.undec_rate,
            m.acc_all,
            m.f1_dec
        );
    }
    Ok(())
}
