//! Monte Carlo Bayes-error estimates for the synthetic generators.
//!
//! Each generator has an analytically optimal rule (twonorm: sign of the
//! mean projection; ringnorm: exact Gaussian likelihood ratio; waveform:
//! likelihood ratio with the mixing variable integrated by quadrature), so
//! fresh draws classified by that rule estimate the irreducible error.
//!
//! ```text
//! cargo run --release -p tritree --example bayes_error
//! ```

use tritree::data::{estimate_bayes_error_mc, registered_bayes_error, GeneratorId};

fn main() {
    let samples = 200_000;
    println!(
        "{:<10} {:>10} {:>12}",
        "generator", "estimate", "registered"
    );
    for id in [
        GeneratorId::Twonorm,
        GeneratorId::Ringnorm,
        GeneratorId::Waveform,
    ] {
        let estimate = estimate_bayes_error_mc(id, samples, 42);
        println!(
            "{:<10} {:>10.4} {:>12.3}",
            id.to_string(),
            estimate,
            registered_bayes_error(id)
        );
    }
}
