//! Log-spaced grid search with successive refinement.
//!
//! The objective is a step function of c, so there is no gradient to follow:
//! a coarse grid spanning `[center/span, center·span]` locates the lowest
//! plateau and each refinement round re-grids a narrower window around the
//! incumbent. Every grid has an odd number of points and is centered on its
//! incumbent, so a refinement can never lose the incumbent's value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::median::median_scaling_factor;
use super::objective::{check_alpha, ConservedGenes, ObjectiveValue};
use crate::data::{ConservedSet, OrthologTable, ScalingFactor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub alpha: f64,
    /// Grid center; the median baseline estimate when unset.
    pub center: Option<f64>,
    pub span: f64,
    pub coarse_points: usize,
    pub refine_rounds: usize,
    /// Ratio between the half-widths of consecutive rounds.
    pub refine_shrink: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            center: None,
            span: 10.0,
            coarse_points: 1000,
            refine_rounds: 3,
            refine_shrink: 0.1,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if let Some(center) = self.center {
            if !(center.is_finite() && center > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "grid center must be positive, got {center}"
                )));
            }
        }
        if !(self.span.is_finite() && self.span > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "grid span must exceed 1, got {}",
                self.span
            )));
        }
        if self.coarse_points < 10 {
            return Err(Error::InvalidConfig(format!(
                "at least 10 coarse grid points are required, got {}",
                self.coarse_points
            )));
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "refine shrink must lie in (0,1), got {}",
                self.refine_shrink
            )));
        }
        Ok(())
    }

    /// Points per grid, rounded up to an odd count.
    fn points(&self) -> usize {
        self.coarse_points | 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScbnEstimate {
    pub factor: ScalingFactor,
    pub objective: ObjectiveValue,
    /// Center of the coarse grid.
    pub center: f64,
    /// Spacing of the final grid in natural-log units.
    pub log_step: f64,
    /// Whether the center came from the median baseline.
    pub center_from_median: bool,
}

impl ScbnEstimate {
    /// Multiplicative width of one final-grid step.
    pub fn step_ratio(&self) -> f64 {
        self.log_step.exp()
    }
}

/// Minimizes the empirical type-I deviation of the conserved genes over c.
pub fn scbn_scaling_factor(
    table: &OrthologTable,
    conserved: &ConservedSet,
    grid: &GridConfig,
) -> Result<ScbnEstimate> {
    grid.validate()?;
    let genes = ConservedGenes::new(table, conserved)?;
    let (center, center_from_median) = match grid.center {
        Some(c) => (c, false),
        None => match median_scaling_factor(table, conserved) {
            Ok(est) => (est.factor.value(), true),
            // Too few conserved genes for the interquartile baseline.
            Err(Error::TooFewConservedGenes(_)) | Err(Error::ZeroMedianExpression(_)) => {
                (1.0, false)
            }
            Err(e) => return Err(e),
        },
    };

    let points = grid.points();
    let mut log_incumbent = center.ln();
    let mut half_width = grid.span.ln();
    let mut step = 2.0 * half_width / (points - 1) as f64;
    let mut best = search_round(&genes, grid.alpha, log_incumbent, half_width, points)?;
    log_incumbent = best.0;

    for _ in 0..grid.refine_rounds {
        half_width = (grid.refine_shrink * half_width).max(step);
        step = 2.0 * half_width / (points - 1) as f64;
        best = search_round(&genes, grid.alpha, log_incumbent, half_width, points)?;
        log_incumbent = best.0;
    }

    Ok(ScbnEstimate {
        factor: ScalingFactor::new(log_incumbent.exp())?,
        objective: best.1,
        center,
        log_step: step,
        center_from_median,
    })
}

fn search_round(
    genes: &ConservedGenes<'_>,
    alpha: f64,
    log_center: f64,
    half_width: f64,
    points: usize,
) -> Result<(f64, ObjectiveValue)> {
    let mid = points / 2;
    let step = half_width / mid as f64;
    let log_points: Vec<f64> = (0..points)
        .map(|i| log_center + (i as f64 - mid as f64) * step)
        .collect();
    let values = log_points
        .par_iter()
        .map(|&lc| genes.evaluate(ScalingFactor::new(lc.exp())?, alpha))
        .collect::<Result<Vec<_>>>()?;
    let i = tie_broken_argmin(&values);
    Ok((log_points[i], values[i]))
}

/// Median index of the minimizing set; for an even-sized set, the middle
/// element nearer the grid center (the lower one on an exact tie).
fn tie_broken_argmin(values: &[ObjectiveValue]) -> usize {
    let min = values
        .iter()
        .map(|v| v.deviation)
        .fold(f64::INFINITY, f64::min);
    let minimizers: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.deviation == min)
        .map(|(i, _)| i)
        .collect();
    let len = minimizers.len();
    if len % 2 == 1 {
        return minimizers[len / 2];
    }
    let center = (values.len() / 2) as isize;
    let a = minimizers[len / 2 - 1];
    let b = minimizers[len / 2];
    if (b as isize - center).abs() < (a as isize - center).abs() {
        b
    } else {
        a
    }
}
