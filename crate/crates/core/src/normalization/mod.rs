//! Scaling-factor estimation between two species.
//!
//! [`scbn_scaling_factor`] searches for the factor at which the conserved
//! genes are rejected at the nominal rate; [`median_scaling_factor`] is the
//! interquartile median baseline it is compared against, and
//! [`estimate_pfdr`] gives the empirical positive false discovery rate.

mod grid;
mod median;
mod objective;
mod pfdr;

pub use grid::{scbn_scaling_factor, GridConfig, ScbnEstimate};
pub use median::{median_scaling_factor, quantile, MedianEstimate};
pub use objective::{empirical_type1_deviation, ConservedGenes, ObjectiveValue};
pub use pfdr::{estimate_pfdr, PfdrEstimate, PfdrInputs};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{ConservedSet, OrthologTable, ScalingFactor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Scbn,
    Median,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Scbn => "scbn",
            Method::Median => "median",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scbn" => Ok(Method::Scbn),
            "median" => Ok(Method::Median),
            other => Err(Error::InvalidConfig(format!(
                "unknown method `{other}` (expected scbn or median)"
            ))),
        }
    }
}

/// Scaling factor from either method, with the method-specific details.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorEstimate {
    pub method: Method,
    pub factor: ScalingFactor,
    pub scbn: Option<ScbnEstimate>,
    pub median: Option<MedianEstimate>,
}

pub fn estimate_factor(
    table: &OrthologTable,
    conserved: &ConservedSet,
    method: Method,
    grid: &GridConfig,
) -> Result<FactorEstimate> {
    Ok(match method {
        Method::Scbn => {
            let est = scbn_scaling_factor(table, conserved, grid)?;
            FactorEstimate {
                method,
                factor: est.factor,
                scbn: Some(est),
                median: None,
            }
        }
        Method::Median => {
            let est = median_scaling_factor(table, conserved)?;
            FactorEstimate {
                method,
                factor: est.factor,
                scbn: None,
                median: Some(est),
            }
        }
    })
}
