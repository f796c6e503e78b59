use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::generator::TruthLabel;
use crate::error::{Error, Result};

/// Classification quality of one run. Ratios are `None` when their
/// denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub false_discoveries: usize,
    pub true_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub f_score: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let sensitivity = ratio(tp, tp + fn_);
        let f_score = if tp == 0 && fp + fn_ > 0 {
            Some(0.0)
        } else {
            precision
                .zip(sensitivity)
                .map(|(p, s)| 2.0 * p * s / (p + s))
        };
        Self {
            false_discoveries: fp,
            true_positives: tp,
            false_negatives: fn_,
            true_negatives: tn,
            precision,
            sensitivity,
            f_score,
        }
    }
}

/// Scores DE calls against truth labels; both must cover the same genes.
/// Unique genes count as true differences.
pub fn evaluate_run<'a, C, T>(calls: C, truth: T) -> Result<Metrics>
where
    C: IntoIterator<Item = (&'a str, bool)>,
    T: IntoIterator<Item = (&'a str, TruthLabel)>,
{
    let truth: HashMap<&str, TruthLabel> = truth.into_iter().collect();
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    let mut seen = 0;
    for (id, called) in calls {
        let label = truth
            .get(id)
            .ok_or_else(|| Error::Mismatch(format!("gene `{id}` has a call but no truth label")))?;
        seen += 1;
        match (called, label.is_de()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    if seen != truth.len() {
        return Err(Error::Mismatch(format!(
            "{} calls for {} labeled genes",
            seen,
            truth.len()
        )));
    }
    Ok(Metrics::from_counts(tp, fp, fn_, tn))
}
