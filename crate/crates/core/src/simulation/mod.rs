//! Synthetic two-species datasets and the benchmark harness comparing
//! normalization methods on them.

mod config;
mod generator;
mod ma;
mod metrics;
mod study;

pub use config::{RateSource, SimConfig};
pub use generator::{generate_dataset, SimulatedDataset, TruthLabel};
pub use ma::{ma_plot_points, MaPlot, MaPoint};
pub use metrics::{evaluate_run, Metrics};
pub use study::{
    derive_seed, preset, run_study, OverlapRow, StudyResult, StudyRow, StudySpec, Sweep,
    SweepParameter, PRESET_NAMES,
};
