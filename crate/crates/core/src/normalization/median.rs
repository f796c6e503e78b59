//! Interquartile median baseline.
//!
//! Per species, conserved-gene expression `e = count / (length · total)` is
//! computed; genes inside the interquartile range of both species are kept
//! and the factor is the ratio of the two medians.

use serde::{Deserialize, Serialize};

use crate::data::{ConservedSet, GeneRecord, OrthologTable, ScalingFactor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianEstimate {
    pub factor: ScalingFactor,
    /// Genes left after the interquartile filter.
    pub kept: usize,
    /// Set when the filter removed every gene and all testable conserved
    /// genes were used instead.
    pub unfiltered_fallback: bool,
}

/// Quantile by linear interpolation between order statistics
/// (`h = (n − 1)·prob`, the R type-7 / NumPy default). `sorted` must be
/// ascending and non-empty.
pub fn quantile(sorted: &[f64], prob: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() || frac == 0.0 {
        sorted[lo.min(sorted.len() - 1)]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    quantile(values, 0.5)
}

fn expression(count: u64, length: u64, total: u64) -> f64 {
    count as f64 / (length as f64 * total as f64)
}

fn sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median_scaling_factor(
    table: &OrthologTable,
    conserved: &ConservedSet,
) -> Result<MedianEstimate> {
    let genes: Vec<&GeneRecord> = conserved.testable_records(table);
    if genes.len() < 4 {
        return Err(Error::TooFewConservedGenes(genes.len()));
    }
    let (n1, n2) = (table.total_sp1(), table.total_sp2());
    let expr: Vec<(f64, f64)> = genes
        .iter()
        .map(|g| {
            (
                expression(g.count_sp1, g.length_sp1, n1),
                expression(g.count_sp2, g.length_sp2, n2),
            )
        })
        .collect();

    let e1 = sorted(expr.iter().map(|e| e.0));
    let e2 = sorted(expr.iter().map(|e| e.1));
    let (q1_lo, q1_hi) = (quantile(&e1, 0.25), quantile(&e1, 0.75));
    let (q2_lo, q2_hi) = (quantile(&e2, 0.25), quantile(&e2, 0.75));

    let mut kept: Vec<(f64, f64)> = expr
        .iter()
        .copied()
        .filter(|&(a, b)| a >= q1_lo && a <= q1_hi && b >= q2_lo && b <= q2_hi)
        .collect();
    let unfiltered_fallback = kept.is_empty();
    if unfiltered_fallback {
        kept = expr;
    }

    let mut k1: Vec<f64> = kept.iter().map(|e| e.0).collect();
    let mut k2: Vec<f64> = kept.iter().map(|e| e.1).collect();
    let m1 = median(&mut k1);
    let m2 = median(&mut k2);
    if m1 == 0.0 {
        return Err(Error::ZeroMedianExpression(1));
    }
    if m2 == 0.0 {
        return Err(Error::ZeroMedianExpression(2));
    }
    Ok(MedianEstimate {
        factor: ScalingFactor::new(m1 / m2)?,
        kept: kept.len(),
        unfiltered_fallback,
    })
}
