//! Three-valued logic and the value types shared by every other module.
//!
//! A split predicate evaluates to one of three verdicts: decisively above the
//! threshold, decisively below, or inside the uncertainty zone around it.
//! Conjunction along a root-to-leaf path follows Kleene's strong three-valued
//! logic, which under the numeric encoding `True = 1`, `Undec = 0`,
//! `False = -1` is simply the minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A three-valued verdict. Ordered so that `False < Undec < True`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(i8)]
pub enum TernaryValue {
    False = -1,
    Undec = 0,
    True = 1,
}

impl TernaryValue {
    /// Numeric encoding: `True = 1`, `Undec = 0`, `False = -1`.
    pub fn encoding(self) -> i8 {
        self as i8
    }

    pub fn from_encoding(value: i8) -> Option<Self> {
        match value {
            -1 => Some(TernaryValue::False),
            0 => Some(TernaryValue::Undec),
            1 => Some(TernaryValue::True),
            _ => None,
        }
    }

    pub const ALL: [TernaryValue; 3] =
        [TernaryValue::False, TernaryValue::Undec, TernaryValue::True];
}

/// Kleene strong conjunction: the minimum under `False < Undec < True`.
pub fn ternary_and(a: TernaryValue, b: TernaryValue) -> TernaryValue {
    a.min(b)
}

/// A split threshold together with the half-width of its uncertainty zone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneParams {
    pub theta: f64,
    pub delta: f64,
}

impl ZoneParams {
    /// Panics if `delta` is negative.
    pub fn new(theta: f64, delta: f64) -> Self {
        assert!(delta >= 0.0, "zone half-width must be non-negative");
        ZoneParams { theta, delta }
    }
}

/// Classify a feature value against a zone.
///
/// `True` for `x > theta + delta`, `Undec` for
/// `theta - delta < x <= theta + delta`, `False` for `x <= theta - delta`.
/// With `delta = 0` the `Undec` region is empty and this reduces to the
/// binary CART test `x <= theta`.
pub fn zone_classify(x: f64, zp: &ZoneParams) -> TernaryValue {
    if x > zp.theta + zp.delta {
        TernaryValue::True
    } else if x > zp.theta - zp.delta {
        TernaryValue::Undec
    } else {
        TernaryValue::False
    }
}

/// A probability vector over `K >= 2` classes, summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassDistribution(Vec<f64>);

impl ClassDistribution {
    /// Tolerance on the sum-to-one invariant; blended combinations
    /// accumulate rounding.
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "need at least two classes, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "entries must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(ClassDistribution(probs))
    }

    /// Normalize non-negative class weights into a distribution.
    pub fn from_weighted_counts(counts: &[f64]) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::TooFewClasses(counts.len()));
        }
        let total: f64 = counts.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroTotalWeight);
        }
        Ok(ClassDistribution(
            counts.iter().map(|c| c / total).collect(),
        ))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    /// Index of the largest probability; ties go to the lowest class index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.0.iter().enumerate().skip(1) {
            if *p > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// `w_left * left + w_right * right`, entrywise.
    pub fn blend(w_left: f64, left: &Self, w_right: f64, right: &Self) -> Self {
        debug_assert_eq!(left.num_classes(), right.num_classes());
        let probs: Vec<f64> = left
            .0
            .iter()
            .zip(&right.0)
            .map(|(l, r)| w_left * l + w_right * r)
            .collect();
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= Self::SUM_TOLERANCE);
        ClassDistribution(probs)
    }
}
