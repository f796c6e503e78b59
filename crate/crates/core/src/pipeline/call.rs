use std::fmt;

use serde::{Deserialize, Serialize};

use super::bh::bh_adjust;
use crate::data::{OrthologTable, ScalingFactor};
use crate::error::{Error, Result};
use crate::exact_test::{gene_test_input, two_sided_exact_pvalue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherSp1,
    HigherSp2,
    None,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::HigherSp1 => "higher_sp1",
            Direction::HigherSp2 => "higher_sp2",
            Direction::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "higher_sp1" => Direction::HigherSp1,
            "higher_sp2" => Direction::HigherSp2,
            "none" => Direction::None,
            _ => return None,
        })
    }

    pub fn swapped(self) -> Self {
        match self {
            Direction::HigherSp1 => Direction::HigherSp2,
            Direction::HigherSp2 => Direction::HigherSp1,
            Direction::None => Direction::None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-gene outcome; p and q are `None` for untestable genes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub gene_id: String,
    pub p_value: Option<f64>,
    pub q_value: Option<f64>,
    pub direction: Direction,
    pub de_call: bool,
}

impl TestResult {
    pub fn is_testable(&self) -> bool {
        self.p_value.is_some()
    }
}

/// Tests every gene at scaling factor `c` and calls DE where `p < cutoff`.
pub fn call_de(table: &OrthologTable, c: ScalingFactor, cutoff: f64) -> Result<Vec<TestResult>> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "cutoff must lie in (0,1), got {cutoff}"
        )));
    }
    let (n1, n2) = (table.total_sp1(), table.total_sp2());
    let mut tested = Vec::with_capacity(table.len());
    for rec in table.records() {
        tested.push(
            gene_test_input(rec, c, n1, n2)?
                .map(|input| (two_sided_exact_pvalue(&input), input.expected_sp1())),
        );
    }
    let pvalues: Vec<Option<f64>> = tested.iter().map(|t| t.map(|(p, _)| p)).collect();
    let qvalues = bh_adjust(&pvalues)?;

    Ok(table
        .records()
        .iter()
        .zip(tested)
        .zip(qvalues)
        .map(|((rec, test), q_value)| match test {
            Some((p, expected)) => {
                let de_call = p < cutoff;
                let x1 = rec.count_sp1 as f64;
                let direction = if !de_call || x1 == expected {
                    Direction::None
                } else if x1 > expected {
                    Direction::HigherSp1
                } else {
                    Direction::HigherSp2
                };
                TestResult {
                    gene_id: rec.gene_id.clone(),
                    p_value: Some(p),
                    q_value,
                    direction,
                    de_call,
                }
            }
            None => TestResult {
                gene_id: rec.gene_id.clone(),
                p_value: None,
                q_value: None,
                direction: Direction::None,
                de_call: false,
            },
        })
        .collect())
}
