use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of the empirical positive false discovery rate at level `alpha`.
///
/// The priors are supplied by the caller: known in simulation, asserted on
/// real data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfdrInputs {
    pub prior_h0: f64,
    pub prior_h1: f64,
    /// P-values of the truly null genes (V₀).
    pub pvalues_null: Vec<f64>,
    /// P-values of the truly differentially expressed genes (V₁).
    pub pvalues_alt: Vec<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PfdrEstimate {
    Value(f64),
    /// Neither group has a rejection, so the ratio is undefined.
    NoRejections,
}

impl PfdrEstimate {
    pub fn value(self) -> Option<f64> {
        match self {
            PfdrEstimate::Value(v) => Some(v),
            PfdrEstimate::NoRejections => None,
        }
    }
}

fn rejection_fraction(pvalues: &[f64], alpha: f64) -> f64 {
    pvalues.iter().filter(|&&p| p < alpha).count() as f64 / pvalues.len() as f64
}

/// `P(H₀)·P̂(R|H₀) / (P(H₀)·P̂(R|H₀) + P(H₁)·P̂(R|H₁))`.
pub fn estimate_pfdr(inputs: &PfdrInputs) -> Result<PfdrEstimate> {
    let PfdrInputs {
        prior_h0,
        prior_h1,
        alpha,
        ..
    } = *inputs;
    if !(0.0..=1.0).contains(&prior_h0) || !(0.0..=1.0).contains(&prior_h1) {
        return Err(Error::InvalidConfig("priors must lie in [0,1]".into()));
    }
    if (prior_h0 + prior_h1 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "priors must sum to 1, got {prior_h0} + {prior_h1}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    if inputs.pvalues_null.is_empty() {
        return Err(Error::InvalidConfig(
            "no null p-values (V0 is empty)".into(),
        ));
    }
    if inputs.pvalues_alt.is_empty() {
        return Err(Error::InvalidConfig(
            "no alternative p-values (V1 is empty)".into(),
        ));
    }
    let null_part = prior_h0 * rejection_fraction(&inputs.pvalues_null, alpha);
    let alt_part = prior_h1 * rejection_fraction(&inputs.pvalues_alt, alpha);
    let denom = null_part + alt_part;
    if denom == 0.0 {
        return Ok(PfdrEstimate::NoRejections);
    }
    Ok(PfdrEstimate::Value(null_part / denom))
}
