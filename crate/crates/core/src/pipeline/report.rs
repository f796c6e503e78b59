use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::call::{call_de, Direction, TestResult};
use super::format::round_json;
use super::io::{load_conserved_list, load_counts_tsv, load_gene_list, write_results_tsv};
use crate::data::{ConservedSet, OrthologTable};
use crate::error::{Error, Result};
use crate::normalization::{estimate_factor, GridConfig, Method, ObjectiveValue};

/// Settings of one normalize-test-call run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub method: Method,
    /// Nominal level of the SCBN objective.
    pub alpha: f64,
    /// DE calling threshold on the raw p-value.
    pub cutoff: f64,
    pub counts: PathBuf,
    pub conserved: PathBuf,
    pub eval_list: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub grid: GridConfig,
}

impl RunConfig {
    pub fn new(counts: impl Into<PathBuf>, conserved: impl Into<PathBuf>) -> Self {
        Self {
            method: Method::Scbn,
            alpha: 0.05,
            cutoff: 1e-6,
            counts: counts.into(),
            conserved: conserved.into(),
            eval_list: None,
            output: None,
            grid: GridConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff > 0.0 && self.cutoff < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cutoff must lie in (0,1), got {}",
                self.cutoff
            )));
        }
        GridConfig {
            alpha: self.alpha,
            ..self.grid
        }
        .validate()
    }
}

/// DE tallies restricted to a user-supplied gene list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub listed: usize,
    pub matched: usize,
    pub de: usize,
    pub higher_sp1: usize,
    pub higher_sp2: usize,
    /// DE genes on the list over all DE genes; an FDR estimate when the list
    /// is assumed to be non-DE.
    pub fdr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub method: Method,
    pub scaling_factor: f64,
    pub objective: Option<ObjectiveValue>,
    pub grid_center: Option<f64>,
    pub median_unfiltered_fallback: Option<bool>,
    pub alpha: f64,
    pub cutoff: f64,
    pub genes: usize,
    pub tested: usize,
    pub untestable: usize,
    pub conserved_genes: usize,
    pub unknown_conserved_ids: usize,
    pub total_de: usize,
    pub higher_sp1: usize,
    pub higher_sp2: usize,
    pub evaluation: Option<EvaluationSummary>,
    pub config: Option<RunConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: ReportSummary,
    pub results: Vec<TestResult>,
}

impl Report {
    /// Summary JSON with floats at six significant digits.
    pub fn summary_json(&self) -> Result<String> {
        let mut value =
            serde_json::to_value(&self.summary).map_err(|e| Error::Io(e.to_string()))?;
        round_json(&mut value);
        let mut text =
            serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn results_tsv(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_results_tsv(&self.results, &mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    /// Writes `<prefix>.summary.json` and `<prefix>.results.tsv`.
    pub fn write(&self, prefix: &Path) -> Result<(PathBuf, PathBuf)> {
        if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let json = with_suffix(prefix, ".summary.json");
        let tsv = with_suffix(prefix, ".results.tsv");
        fs::write(&json, self.summary_json()?)?;
        fs::write(&tsv, self.results_tsv()?)?;
        Ok((json, tsv))
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Normalizes, tests and calls an in-memory table.
pub fn analyze(
    table: &OrthologTable,
    conserved: &ConservedSet,
    method: Method,
    alpha: f64,
    cutoff: f64,
    grid: &GridConfig,
    eval_list: Option<&[String]>,
) -> Result<Report> {
    let grid = GridConfig { alpha, ..*grid };
    let estimate = estimate_factor(table, conserved, method, &grid)?;
    let results = call_de(table, estimate.factor, cutoff)?;

    let tested = results.iter().filter(|r| r.is_testable()).count();
    let higher_sp1 = results
        .iter()
        .filter(|r| r.direction == Direction::HigherSp1)
        .count();
    let higher_sp2 = results
        .iter()
        .filter(|r| r.direction == Direction::HigherSp2)
        .count();
    let total_de = results.iter().filter(|r| r.de_call).count();

    let evaluation = eval_list.map(|ids| {
        let listed: HashSet<&str> = ids.iter().map(String::as_str).collect();
        let on_list: Vec<&TestResult> = results
            .iter()
            .filter(|r| listed.contains(r.gene_id.as_str()))
            .collect();
        let de = on_list.iter().filter(|r| r.de_call).count();
        EvaluationSummary {
            listed: listed.len(),
            matched: on_list.len(),
            de,
            higher_sp1: on_list
                .iter()
                .filter(|r| r.direction == Direction::HigherSp1)
                .count(),
            higher_sp2: on_list
                .iter()
                .filter(|r| r.direction == Direction::HigherSp2)
                .count(),
            fdr: (total_de > 0).then(|| de as f64 / total_de as f64),
        }
    });

    Ok(Report {
        summary: ReportSummary {
            method,
            scaling_factor: estimate.factor.value(),
            objective: estimate.scbn.map(|s| s.objective),
            grid_center: estimate.scbn.map(|s| s.center),
            median_unfiltered_fallback: estimate.median.map(|m| m.unfiltered_fallback),
            alpha,
            cutoff,
            genes: table.len(),
            tested,
            untestable: table.len() - tested,
            conserved_genes: conserved.len(),
            unknown_conserved_ids: 0,
            total_de,
            higher_sp1,
            higher_sp2,
            evaluation,
            config: None,
        },
        results,
    })
}

/// Loads the inputs named in `config` and runs [`analyze`]. Output files
/// are written when `config.output` is set.
pub fn run_pipeline(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let table = load_counts_tsv(&config.counts)?;
    let conserved = load_conserved_list(&config.conserved, &table)?;
    let eval_list = config.eval_list.as_ref().map(load_gene_list).transpose()?;
    let mut report = analyze(
        &table,
        &conserved.set,
        config.method,
        config.alpha,
        config.cutoff,
        &config.grid,
        eval_list.as_deref(),
    )?;
    report.summary.unknown_conserved_ids = conserved.unknown.len();
    report.summary.config = Some(config.clone());
    if let Some(prefix) = &config.output {
        report.write(prefix)?;
    }
    Ok(report)
}
