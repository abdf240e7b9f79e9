//! Five-fold stratified cross-validation on the bundled diabetes-style
//! screening table, margin deltas with probabilistic routing against the
//! binary CART baseline.
//!
//! ```text
//! cargo run --release -p tritree --example cross_validation
//! ```

use tritree::baseline::BinaryCart;
use tritree::data::{load_csv, stratified_kfold, Standardizer};
use tritree::eval::{compute_metrics, efficiency, recover_uncertain_accuracy};
use tritree::{fit, predict_dataset, Architecture, Criterion, DeltaMethod, FitParams, RoutingMode};

fn main() -> tritree::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/diabetes.csv");
    let data = load_csv(path, "label")?;
    println!(
        "{} rows, {} features, classes {:?}\n",
        data.n_rows(),
        data.n_features(),
        data.class_names
    );

    let k = 5;
    let plan = stratified_kfold(data.labels(), k, 42)?;
    let params = FitParams::new(DeltaMethod::margin(), Architecture::BinaryTernary);

    let (mut dec, mut und, mut all, mut base) = (0.0, 0.0, 0.0, 0.0);
    for f in 0..k {
        let train_rows = plan.train_indices(f);
        let test_rows = plan.test_indices(f);
        let scaler = Standardizer::fit(&data, &train_rows);
        let train = scaler.transform(&data, &train_rows);
        let test = scaler.transform(&data, test_rows);

        let cart = BinaryCart::fit(&train, 4, Criterion::Gini)?;
        let all_test: Vec<usize> = (0..test.n_rows()).collect();
        let cart_acc = cart.accuracy(&test, &all_test)?;

        let tree = fit(&train, &params)?;
        let preds = predict_dataset(&tree, &test, RoutingMode::Probabilistic)?;
        let m = compute_metrics(&preds, test.labels(), test.n_classes())?;
        println!(
            "fold {f}: dec_acc {:.4}  undec {:>5.1}%  acc_all {:.4}  cart {:.4}",
            m.dec_acc,
            100.0 * m.undec_rate,
            m.acc_all,
            cart_acc
        );
        dec += m.dec_acc / k as f64;
        und += m.undec_rate / k as f64;
        all += m.acc_all / k as f64;
        base += cart_acc / k as f64;
    }

    println!("\nmeans over {k} folds:");
    println!(
        "  margin/prob dec_acc {dec:.4}  undec {:.1}%  acc_all {all:.4}",
        100.0 * und
    );
    println!("  cart baseline       {base:.4}");
    if und > 0.0 {
        println!(
            "  efficiency {:.4}  recovered uncertain-set accuracy {:.4}",
            efficiency(dec, base, und)?,
            recover_uncertain_accuracy(all, dec, und)?
        );
    }
    Ok(())
}
