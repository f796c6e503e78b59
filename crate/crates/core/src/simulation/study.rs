//! Replicated method comparisons over a parameter sweep.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::generator::generate_dataset;
use super::metrics::{evaluate_run, Metrics};
use crate::error::{Error, Result};
use crate::normalization::{estimate_factor, GridConfig, Method};
use crate::pipeline::format::format_sig6;
use crate::pipeline::{call_de, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    ConservedSize,
    NoiseRate,
    DeRate,
    Fold,
    UpRateSp2,
    Cutoff,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::ConservedSize => "conserved_size",
            SweepParameter::NoiseRate => "noise_rate",
            SweepParameter::DeRate => "de_rate",
            SweepParameter::Fold => "fold",
            SweepParameter::UpRateSp2 => "up_rate_sp2",
            SweepParameter::Cutoff => "cutoff",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

fn default_replicates() -> usize {
    100
}
fn default_alpha() -> f64 {
    0.05
}
fn default_cutoff() -> f64 {
    0.01
}
fn default_methods() -> Vec<Method> {
    vec![Method::Scbn, Method::Median]
}

/// A study: base generator config, optional one-parameter sweep, methods
/// to compare and replicate count. Serialized as the JSON study spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySpec {
    pub name: String,
    #[serde(default)]
    pub base: SimConfig,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Master seed; replicate seeds are derived from it.
    #[serde(default)]
    pub seed: u64,
    /// Nominal level of the SCBN objective.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// DE calling threshold.
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default)]
    pub grid: GridConfig,
}

impl StudySpec {
    pub fn new(name: impl Into<String>, base: SimConfig) -> Self {
        Self {
            name: name.into(),
            base,
            sweep: None,
            methods: default_methods(),
            replicates: default_replicates(),
            seed: 0,
            alpha: default_alpha(),
            cutoff: default_cutoff(),
            grid: GridConfig::default(),
        }
    }

    /// One (config, cutoff, sweep value) per cell.
    fn cells(&self) -> Result<Vec<(SimConfig, f64, Option<f64>)>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![(self.base.clone(), self.cutoff, None)]);
        };
        if sweep.values.is_empty() {
            return Err(Error::InvalidConfig("sweep has no values".into()));
        }
        sweep
            .values
            .iter()
            .map(|&v| {
                let mut cfg = self.base.clone();
                let mut cutoff = self.cutoff;
                match sweep.parameter {
                    SweepParameter::ConservedSize => {
                        if v < 1.0 || v.fract() != 0.0 {
                            return Err(Error::InvalidConfig(format!(
                                "conserved_size must be a positive integer, got {v}"
                            )));
                        }
                        cfg.conserved_size = v as usize;
                    }
                    SweepParameter::NoiseRate => cfg.noise_rate = v,
                    SweepParameter::DeRate => cfg.de_rate = v,
                    SweepParameter::Fold => cfg.fold = v,
                    SweepParameter::UpRateSp2 => cfg.up_rate_sp2 = v,
                    SweepParameter::Cutoff => cutoff = v,
                }
                cfg.validate()?;
                Ok((cfg, cutoff, Some(v)))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig(
                "study needs at least one method".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig(
                "study needs at least one replicate".into(),
            ));
        }
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
        .validate()?;
        for (_, cutoff, _) in self.cells()? {
            if !(cutoff > 0.0 && cutoff < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "cutoff must lie in (0,1), got {cutoff}"
                )));
            }
        }
        Ok(())
    }
}

/// Mean metrics of one (sweep value, method) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub parameter: Option<String>,
    pub value: Option<f64>,
    pub method: Method,
    pub replicates: usize,
    pub mean_false_discoveries: f64,
    pub mean_precision: Option<f64>,
    pub precision_undefined: usize,
    pub mean_sensitivity: Option<f64>,
    pub sensitivity_undefined: usize,
    pub mean_f_score: Option<f64>,
    pub f_score_undefined: usize,
    pub mean_de_calls: f64,
    pub mean_factor: f64,
    pub mean_true_c: f64,
    /// Mean of `|ĉ / c_true − 1|`.
    pub mean_relative_error: f64,
}

/// Mean size of the intersection of the first two methods' DE calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub parameter: Option<String>,
    pub value: Option<f64>,
    pub methods: (Method, Method),
    pub mean_overlap: f64,
    /// Overlap counting only genes called in the same direction.
    pub mean_overlap_directional: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub name: String,
    pub rows: Vec<StudyRow>,
    pub overlaps: Vec<OverlapRow>,
    /// Per-replicate raw outcomes, cell-major then replicate, then method.
    #[serde(skip)]
    pub replicates: Vec<Vec<Vec<MethodOutcome>>>,
}

/// One method applied to one replicate dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    pub factor: f64,
    pub true_c: f64,
    pub metrics: Metrics,
    pub calls: Vec<(usize, Direction)>,
}

const NA: &str = "NA";

fn opt(v: Option<f64>) -> String {
    v.map(format_sig6).unwrap_or_else(|| NA.to_string())
}

impl StudyResult {
    /// One line per row: sweep value, method and mean metrics.
    pub fn rows_tsv(&self) -> String {
        let mut out = String::from(
            "parameter\tvalue\tmethod\treplicates\tmean_false_discoveries\tmean_precision\tprecision_undefined\t\
             mean_sensitivity\tsensitivity_undefined\tmean_f_score\tf_score_undefined\tmean_de_calls\t\
             mean_factor\tmean_true_c\tmean_relative_error\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.parameter.as_deref().unwrap_or(NA),
                opt(r.value),
                r.method,
                r.replicates,
                format_sig6(r.mean_false_discoveries),
                opt(r.mean_precision),
                r.precision_undefined,
                opt(r.mean_sensitivity),
                r.sensitivity_undefined,
                opt(r.mean_f_score),
                r.f_score_undefined,
                format_sig6(r.mean_de_calls),
                format_sig6(r.mean_factor),
                format_sig6(r.mean_true_c),
                format_sig6(r.mean_relative_error),
            );
        }
        out
    }

    pub fn overlaps_tsv(&self) -> String {
        let mut out = String::from(
            "parameter\tvalue\tmethod_a\tmethod_b\tmean_overlap\tmean_overlap_directional\n",
        );
        for o in &self.overlaps {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                o.parameter.as_deref().unwrap_or(NA),
                opt(o.value),
                o.methods.0,
                o.methods.1,
                format_sig6(o.mean_overlap),
                format_sig6(o.mean_overlap_directional),
            );
        }
        out
    }
}

/// SplitMix64 output for replicate `replicate` of master seed `master`.
/// Every sweep cell reuses the same replicate seeds.
pub fn derive_seed(master: u64, replicate: usize) -> u64 {
    let mut z = master.wrapping_add(
        (replicate as u64)
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_replicate(
    spec: &StudySpec,
    config: &SimConfig,
    cutoff: f64,
    seed: u64,
) -> Result<Vec<MethodOutcome>> {
    let data = generate_dataset(&SimConfig {
        seed,
        ..config.clone()
    })?;
    let grid = GridConfig {
        alpha: spec.alpha,
        ..spec.grid
    };
    spec.methods
        .iter()
        .map(|&method| {
            let est = estimate_factor(&data.table, &data.reported_conserved, method, &grid)?;
            let results = call_de(&data.table, est.factor, cutoff)?;
            let tested = results
                .iter()
                .zip(&data.truth)
                .filter(|(r, _)| r.is_testable());
            let metrics = evaluate_run(
                tested.clone().map(|(r, _)| (r.gene_id.as_str(), r.de_call)),
                tested.map(|(r, &l)| (r.gene_id.as_str(), l)),
            )?;
            let calls = results
                .iter()
                .enumerate()
                .filter(|(_, r)| r.de_call)
                .map(|(i, r)| (i, r.direction))
                .collect();
            Ok(MethodOutcome {
                method,
                factor: est.factor.value(),
                true_c: data.true_c.value(),
                metrics,
                calls,
            })
        })
        .collect()
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> (Option<f64>, usize) {
    let (mut sum, mut n, mut undefined) = (0.0, 0usize, 0usize);
    for v in values {
        match v {
            Some(v) => {
                sum += v;
                n += 1;
            }
            None => undefined += 1,
        }
    }
    ((n > 0).then(|| sum / n as f64), undefined)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Runs generate → normalize → test → call → evaluate for every cell,
/// method and replicate. Results depend only on the spec.
pub fn run_study(spec: &StudySpec) -> Result<StudyResult> {
    spec.validate()?;
    let cells = spec.cells()?;
    let parameter = spec
        .sweep
        .as_ref()
        .map(|s| s.parameter.as_str().to_string());
    let mut rows = Vec::new();
    let mut overlaps = Vec::new();
    let mut all = Vec::with_capacity(cells.len());

    for (config, cutoff, value) in &cells {
        let outcomes: Vec<Vec<MethodOutcome>> = (0..spec.replicates)
            .into_par_iter()
            .map(|r| run_replicate(spec, config, *cutoff, derive_seed(spec.seed, r)))
            .collect::<Result<_>>()?;

        for (m, &method) in spec.methods.iter().enumerate() {
            let per_rep = || outcomes.iter().map(move |o| &o[m]);
            let (mean_precision, precision_undefined) =
                mean_defined(per_rep().map(|o| o.metrics.precision));
            let (mean_sensitivity, sensitivity_undefined) =
                mean_defined(per_rep().map(|o| o.metrics.sensitivity));
            let (mean_f_score, f_score_undefined) =
                mean_defined(per_rep().map(|o| o.metrics.f_score));
            rows.push(StudyRow {
                parameter: parameter.clone(),
                value: *value,
                method,
                replicates: spec.replicates,
                mean_false_discoveries: mean(per_rep().map(|o| o.metrics.false_discoveries as f64)),
                mean_precision,
                precision_undefined,
                mean_sensitivity,
                sensitivity_undefined,
                mean_f_score,
                f_score_undefined,
                mean_de_calls: mean(per_rep().map(|o| o.calls.len() as f64)),
                mean_factor: mean(per_rep().map(|o| o.factor)),
                mean_true_c: mean(per_rep().map(|o| o.true_c)),
                mean_relative_error: mean(per_rep().map(|o| (o.factor / o.true_c - 1.0).abs())),
            });
        }

        if spec.methods.len() >= 2 {
            let (any, directional): (Vec<f64>, Vec<f64>) = outcomes
                .iter()
                .map(|o| {
                    let a: HashSet<(usize, Direction)> = o[0].calls.iter().copied().collect();
                    let a_genes: HashSet<usize> = a.iter().map(|c| c.0).collect();
                    let any = o[1].calls.iter().filter(|c| a_genes.contains(&c.0)).count();
                    let dir = o[1].calls.iter().filter(|c| a.contains(c)).count();
                    (any as f64, dir as f64)
                })
                .unzip();
            overlaps.push(OverlapRow {
                parameter: parameter.clone(),
                value: *value,
                methods: (spec.methods[0], spec.methods[1]),
                mean_overlap: mean(any.into_iter()),
                mean_overlap_directional: mean(directional.into_iter()),
            });
        }
        all.push(outcomes);
    }

    Ok(StudyResult {
        name: spec.name.clone(),
        rows,
        overlaps,
        replicates: all,
    })
}

pub const PRESET_NAMES: [&str; 7] = [
    "study1", "study2", "study3", "study4", "study5", "study6", "study7",
];

fn study1_base() -> SimConfig {
    SimConfig {
        de_rate: 0.10,
        fold: 1.2,
        up_rate_sp2: 0.90,
        n_unique_sp1: 1000,
        n_unique_sp2: 2000,
        n_unmapped_sp1: 2000,
        n_unmapped_sp2: 4000,
        ..SimConfig::default()
    }
}

fn sweep(parameter: SweepParameter, values: &[f64]) -> Option<Sweep> {
    Some(Sweep {
        parameter,
        values: values.to_vec(),
    })
}

/// Built-in study specs mirroring the seven simulation designs.
pub fn preset(name: &str) -> Option<StudySpec> {
    let noise_0_to_06 = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
    let study2_base = SimConfig {
        fold: 1.5,
        conserved_size: 1000,
        ..study1_base()
    };
    let study4_base = SimConfig {
        de_rate: 0.40,
        ..study1_base()
    };
    let mut spec = match name {
        // conserved-set size from 50 to 1000
        "study1" => StudySpec {
            sweep: sweep(
                SweepParameter::ConservedSize,
                &[50.0, 100.0, 200.0, 400.0, 600.0, 800.0, 1000.0],
            ),
            ..StudySpec::new(name, study1_base())
        },
        // noise in the conserved set from 0 to 0.6
        "study2" => StudySpec {
            sweep: sweep(SweepParameter::NoiseRate, &noise_0_to_06),
            ..StudySpec::new(name, study2_base.clone())
        },
        // strong, lopsided DE to make the factor lines visible on MA plots
        "study3" => StudySpec {
            sweep: sweep(SweepParameter::NoiseRate, &[0.0, 0.4]),
            ..StudySpec::new(
                name,
                SimConfig {
                    de_rate: 0.20,
                    fold: 8.0,
                    up_rate_sp2: 0.70,
                    conserved_size: 1000,
                    ..study1_base()
                },
            )
        },
        "study4" => StudySpec {
            sweep: sweep(
                SweepParameter::Cutoff,
                &[0.0001, 0.001, 0.01, 0.05, 0.1, 0.2, 0.4, 0.6],
            ),
            ..StudySpec::new(name, study4_base.clone())
        },
        "study5" => StudySpec {
            sweep: sweep(SweepParameter::NoiseRate, &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5]),
            ..StudySpec::new(name, study2_base.clone())
        },
        "study6" => StudySpec {
            sweep: sweep(SweepParameter::NoiseRate, &noise_0_to_06),
            ..StudySpec::new(name, study2_base)
        },
        "study7" => StudySpec {
            sweep: sweep(SweepParameter::DeRate, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]),
            ..StudySpec::new(
                name,
                SimConfig {
                    fold: 1.5,
                    noise_rate: 0.2,
                    ..study4_base
                },
            )
        },
        _ => return None,
    };
    spec.cutoff = 0.01;
    Some(spec)
}
