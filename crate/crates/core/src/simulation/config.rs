use serde::{Deserialize, Serialize};

use crate::data::OrthologTable;
use crate::error::{Error, Result};

/// Where per-gene expression rates μ come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateSource {
    /// `μ = exp(N(log_mean, log_sd²))`.
    LogNormal { log_mean: f64, log_sd: f64 },
    /// Resampled with replacement from a reference distribution of rates.
    Empirical { rates: Vec<f64> },
}

impl Default for RateSource {
    fn default() -> Self {
        RateSource::LogNormal {
            log_mean: 0.0,
            log_sd: 1.5,
        }
    }
}

impl RateSource {
    /// Normalized species-1 rates `count / (length · N₁)` of the expressed
    /// genes of a reference table.
    pub fn from_table(table: &OrthologTable) -> Result<Self> {
        let n1 = table.total_sp1() as f64;
        let rates: Vec<f64> = table
            .records()
            .iter()
            .filter(|r| r.count_sp1 > 0)
            .map(|r| r.count_sp1 as f64 / (r.length_sp1 as f64 * n1))
            .collect();
        if rates.is_empty() {
            return Err(Error::InvalidConfig(
                "reference table has no expressed genes".into(),
            ));
        }
        Ok(RateSource::Empirical { rates })
    }

    pub fn describe(&self) -> String {
        match self {
            RateSource::LogNormal { log_mean, log_sd } => {
                format!("log-normal(log_mean={log_mean}, log_sd={log_sd})")
            }
            RateSource::Empirical { rates } => {
                format!("empirical({} reference rates)", rates.len())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            RateSource::LogNormal { log_mean, log_sd } => {
                if !log_mean.is_finite() || !(log_sd.is_finite() && *log_sd >= 0.0) {
                    return Err(Error::InvalidConfig(
                        "log-normal parameters must be finite, sd >= 0".into(),
                    ));
                }
            }
            RateSource::Empirical { rates } => {
                if rates.is_empty() || rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                    return Err(Error::InvalidConfig(
                        "empirical rates must be a non-empty list of non-negative values".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Generator parameters for one synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub n_orthologs: usize,
    pub de_rate: f64,
    pub fold: f64,
    pub up_rate_sp2: f64,
    /// Orthologs expressed only in species 1 (added on top of `n_orthologs`).
    pub n_unique_sp1: usize,
    pub n_unique_sp2: usize,
    /// Genes present only in one species; they add reads to that library
    /// but never enter the ortholog table.
    pub n_unmapped_sp1: usize,
    pub n_unmapped_sp2: usize,
    pub conserved_size: usize,
    pub noise_rate: f64,
    pub depth_sp1: f64,
    pub depth_sp2: f64,
    pub rate_source: RateSource,
    /// Inclusive range of gene lengths, drawn uniformly per gene and species.
    pub length_min: u64,
    pub length_max: u64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_orthologs: 10_000,
            de_rate: 0.10,
            fold: 1.2,
            up_rate_sp2: 0.90,
            n_unique_sp1: 1000,
            n_unique_sp2: 2000,
            n_unmapped_sp1: 2000,
            n_unmapped_sp2: 4000,
            conserved_size: 1000,
            noise_rate: 0.0,
            depth_sp1: 1e6,
            depth_sp2: 1e6,
            rate_source: RateSource::default(),
            length_min: 200,
            length_max: 10_200,
            seed: 1,
        }
    }
}

fn unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{name} must lie in [0,1], got {v}"
        )))
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_orthologs == 0 {
            return Err(Error::InvalidConfig("n_orthologs must be positive".into()));
        }
        unit("de_rate", self.de_rate)?;
        unit("up_rate_sp2", self.up_rate_sp2)?;
        unit("noise_rate", self.noise_rate)?;
        if !(self.fold.is_finite() && self.fold > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fold must exceed 1, got {}",
                self.fold
            )));
        }
        if !(self.depth_sp1 > 0.0 && self.depth_sp2 > 0.0)
            || !self.depth_sp1.is_finite()
            || !self.depth_sp2.is_finite()
        {
            return Err(Error::InvalidConfig("depths must be positive".into()));
        }
        if self.length_min == 0 || self.length_min > self.length_max {
            return Err(Error::InvalidConfig(format!(
                "invalid length range [{}, {}]",
                self.length_min, self.length_max
            )));
        }
        if self.conserved_size == 0 {
            return Err(Error::InvalidConfig(
                "conserved_size must be positive".into(),
            ));
        }
        self.rate_source.validate()
    }

    /// Number of differentially expressed orthologs.
    pub fn n_de(&self) -> usize {
        (self.de_rate * self.n_orthologs as f64).round() as usize
    }

    /// Null and DE members of the reported conserved set.
    pub fn conserved_split(&self) -> (usize, usize) {
        let nulls = ((1.0 - self.noise_rate) * self.conserved_size as f64 - 1e-9).ceil() as usize;
        let nulls = nulls.min(self.conserved_size);
        (nulls, self.conserved_size - nulls)
    }
}
