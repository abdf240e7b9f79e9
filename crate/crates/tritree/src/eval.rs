//! Evaluation metrics and paired statistics.
//!
//! Decided accuracy, boundary-uncertain rate, overall accuracy, decided
//! macro-F1, the efficiency ratio, the uncertain-set accuracy recoverable
//! from reported aggregates, the undecided-to-Bayes ratio, a one-sided
//! Wilcoxon signed-rank test (exact for small samples), and thresholded
//! win/tie/loss counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predict::Prediction;
use crate::ternary::TernaryValue;

/// Practical-significance threshold for win/tie/loss: half a percentage
/// point of decided accuracy.
pub const WIN_TIE_LOSS_THRESHOLD: f64 = 0.005;

/// Per-evaluation metrics.
///
/// The counting identity `acc_all = (1 - u) * dec_acc + u * acc_undec`
/// holds to within a few ulps; `decomposition_residual` measures it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Accuracy over instances with a `True` verdict. When every instance is
    /// boundary-uncertain this holds the overall accuracy and
    /// `no_decided` is set.
    pub dec_acc: f64,
    /// Fraction of instances with an `Undec` verdict.
    pub undec_rate: f64,
    pub acc_all: f64,
    /// Macro-averaged F1 over the decided subset, restricted to classes
    /// present in its true labels.
    pub f1_dec: f64,
    /// Measured accuracy on the boundary-uncertain instances; 0 when there
    /// are none (the term then vanishes from the decomposition).
    pub acc_undec: f64,
    pub n: usize,
    /// Degenerate flag: no decided instances existed.
    pub no_decided: bool,
}

impl MetricsReport {
    /// `acc_all - [(1 - u) * dec_acc + u * acc_undec]`, signed.
    pub fn decomposition_residual(&self) -> f64 {
        let recombined = (1.0 - self.undec_rate) * self.dec_acc + self.undec_rate * self.acc_undec;
        self.acc_all - recombined
    }
}

fn macro_f1(pairs: &[(usize, usize)], n_classes: usize) -> f64 {
    // (true label, predicted label) pairs; classes absent from the true
    // labels are excluded from the average
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    let mut present = vec![false; n_classes];
    for &(truth, pred) in pairs {
        present[truth] = true;
        if truth == pred {
            tp[truth] += 1;
        } else {
            fn_[truth] += 1;
            fp[pred] += 1;
        }
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in 0..n_classes {
        if !present[k] {
            continue;
        }
        let denom = 2 * tp[k] + fp[k] + fn_[k];
        sum += if denom > 0 {
            2.0 * tp[k] as f64 / denom as f64
        } else {
            0.0
        };
        count += 1;
    }
    if count > 0 {
        sum / count as f64
    } else {
        0.0
    }
}

/// Compute all per-evaluation metrics from predictions and true labels.
pub fn compute_metrics(
    predictions: &[Prediction],
    labels: &[usize],
    n_classes: usize,
) -> Result<MetricsReport> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = predictions.len();
    let mut dec_n = 0usize;
    let mut dec_correct = 0usize;
    let mut und_n = 0usize;
    let mut und_correct = 0usize;
    let mut dec_pairs: Vec<(usize, usize)> = Vec::new();
    for (pred, &truth) in predictions.iter().zip(labels) {
        debug_assert_ne!(pred.verdict, TernaryValue::False, "no False verdicts exist");
        let correct = pred.label == truth;
        if pred.verdict == TernaryValue::True {
            dec_n += 1;
            dec_correct += usize::from(correct);
            dec_pairs.push((truth, pred.label));
        } else {
            und_n += 1;
            und_correct += usize::from(correct);
        }
    }
    let acc_all = (dec_correct + und_correct) as f64 / n as f64;
    let undec_rate = und_n as f64 / n as f64;
    let no_decided = dec_n == 0;
    let dec_acc = if no_decided {
        acc_all
    } else {
        dec_correct as f64 / dec_n as f64
    };
    let acc_undec = if und_n > 0 {
        und_correct as f64 / und_n as f64
    } else {
        0.0
    };
    let f1_dec = if no_decided {
        let all_pairs: Vec<(usize, usize)> = predictions
            .iter()
            .zip(labels)
            .map(|(p, &t)| (t, p.label))
            .collect();
        macro_f1(&all_pairs, n_classes)
    } else {
        macro_f1(&dec_pairs, n_classes)
    };
    let report = MetricsReport {
        dec_acc,
        undec_rate,
        acc_all,
        f1_dec,
        acc_undec,
        n,
        no_decided,
    };
    debug_assert!(report.decomposition_residual().abs() <= 1e-12);
    Ok(report)
}

/// Accuracy on the boundary-uncertain set, recovered from reported
/// aggregates: `(acc_all - (1 - u) * dec_acc) / u`.
pub fn recover_uncertain_accuracy(acc_all: f64, dec_acc: f64, u: f64) -> Result<f64> {
    if u <= 0.0 {
        return Err(Error::ZeroUncertainRate);
    }
    Ok((acc_all - (1.0 - u) * dec_acc) / u)
}

/// Decided-accuracy gain over the baseline per unit of boundary-uncertain
/// rate.
pub fn efficiency(dec_acc: f64, baseline_acc: f64, u: f64) -> Result<f64> {
    if u <= 0.0 {
        return Err(Error::ZeroUncertainRate);
    }
    Ok((dec_acc - baseline_acc) / u)
}

/// Boundary-uncertain rate over the dataset's known Bayes error.
pub fn ub_ratio(undec_rate: f64, bayes_error: f64) -> Result<f64> {
    if bayes_error <= 0.0 {
        return Err(Error::NonPositiveBayesError(bayes_error));
    }
    Ok(undec_rate / bayes_error)
}

/// Outcome of the one-sided Wilcoxon signed-rank test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// One-sided p-value for the alternative "median difference > 0".
    pub p_value: f64,
    /// Count of nonzero differences actually ranked.
    pub n_used: usize,
    /// The signed-rank statistic `W+`.
    pub statistic: f64,
    /// No nonzero differences remained after dropping zeros.
    pub degenerate: bool,
}

/// Largest sample size for which the exact permutation distribution is
/// enumerated; beyond it a tie-corrected normal approximation with
/// continuity correction is used.
pub const WILCOXON_EXACT_LIMIT: usize = 25;

fn average_ranks(sorted_abs: &[f64]) -> Vec<f64> {
    let n = sorted_abs.len();
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted_abs[j + 1] == sorted_abs[i] {
            j += 1;
        }
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for rank in ranks.iter_mut().take(j + 1).skip(i) {
            *rank = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Exact tail `P(W >= w_plus)` of the permutation distribution over all
/// `2^n` sign assignments, by dynamic programming on doubled ranks (ranks
/// are multiples of one half, so doubling makes them integers).
fn exact_upper_tail(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max_sum + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=max_sum).rev() {
            counts[s] += counts[s - r];
        }
    }
    let target = (2.0 * w_plus).round() as usize;
    if target > max_sum {
        return 0.0;
    }
    let tail: u64 = counts[target..].iter().sum();
    tail as f64 / (1u64 << ranks.len()) as f64
}

/// Standard normal CDF (Hart's rational approximation, double precision).
fn normal_cdf(z: f64) -> f64 {
    let x = z.abs();
    if x > 37.0 {
        return if z > 0.0 { 1.0 } else { 0.0 };
    }
    let e = (-x * x / 2.0).exp();
    let upper = if x < 7.071_067_811_865_475 {
        let mut num = 3.526_249_659_989_11e-2 * x + 0.700_383_064_443_688;
        num = num * x + 6.373_962_203_531_65;
        num = num * x + 33.912_866_078_383;
        num = num * x + 112.079_291_497_871;
        num = num * x + 221.213_596_169_931;
        num = num * x + 220.206_867_912_376;
        let mut den = 8.838_834_764_831_84e-2 * x + 1.755_667_163_182_64;
        den = den * x + 16.064_177_579_207;
        den = den * x + 86.780_732_202_946_1;
        den = den * x + 296.564_248_779_674;
        den = den * x + 637.333_633_378_831;
        den = den * x + 793.826_512_519_948;
        den = den * x + 440.413_735_824_752;
        e * num / den
    } else {
        let mut build = x + 0.65;
        build = x + 4.0 / build;
        build = x + 3.0 / build;
        build = x + 2.0 / build;
        build = x + 1.0 / build;
        e / (build * 2.506_628_274_631_000_5)
    };
    if z > 0.0 {
        1.0 - upper
    } else {
        upper
    }
}

/// One-sided Wilcoxon signed-rank test for "median difference > 0".
///
/// Zero differences are dropped before ranking; absolute ties receive
/// average ranks. With every difference zero the test is degenerate and
/// reports `p = 1`.
pub fn wilcoxon_one_sided(diffs: &[f64]) -> WilcoxonResult {
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    if nonzero.is_empty() {
        return WilcoxonResult {
            p_value: 1.0,
            n_used: 0,
            statistic: 0.0,
            degenerate: true,
        };
    }
    let n = nonzero.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        nonzero[a]
            .abs()
            .partial_cmp(&nonzero[b].abs())
            .expect("finite differences")
    });
    let sorted_abs: Vec<f64> = order.iter().map(|&i| nonzero[i].abs()).collect();
    let ranks_sorted = average_ranks(&sorted_abs);
    let mut w_plus = 0.0;
    let mut tie_term = 0.0;
    {
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && sorted_abs[j + 1] == sorted_abs[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    for (pos, &i) in order.iter().enumerate() {
        if nonzero[i] > 0.0 {
            w_plus += ranks_sorted[pos];
        }
    }

    let p_value = if n <= WILCOXON_EXACT_LIMIT {
        exact_upper_tail(&ranks_sorted, w_plus)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (w_plus - mean - 0.5) / var.sqrt();
        (1.0 - normal_cdf(z)).max(f64::MIN_POSITIVE)
    };
    WilcoxonResult {
        p_value,
        n_used: n,
        statistic: w_plus,
        degenerate: false,
    }
}

/// Thresholded win/tie/loss counts over `(method, baseline)` pairs.
pub fn win_tie_loss(paired: &[(f64, f64)], threshold: f64) -> (usize, usize, usize) {
    let mut wins = 0;
    let mut ties = 0;
    let mut losses = 0;
    for &(method, baseline) in paired {
        let diff = method - baseline;
        if diff > threshold {
            wins += 1;
        } else if diff < -threshold {
            losses += 1;
        } else {
            ties += 1;
        }
    }
    (wins, ties, losses)
}

/// Paired comparison of a method against the baseline over datasets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedResult {
    pub p_value: f64,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    pub degenerate: bool,
}

/// Wilcoxon and win/tie/loss over `(method, baseline)` pairs.
pub fn paired_comparison(paired: &[(f64, f64)], threshold: f64) -> PairedResult {
    let diffs: Vec<f64> = paired.iter().map(|(m, b)| m - b).collect();
    let wilcoxon = wilcoxon_one_sided(&diffs);
    let (wins, ties, losses) = win_tie_loss(paired, threshold);
    PairedResult {
        p_value: wilcoxon.p_value,
        wins,
        ties,
        losses,
        degenerate: wilcoxon.degenerate,
    }
}
