//! File ingestion, multiple-testing adjustment, DE calling and the
//! end-to-end run that ties them together.

mod bh;
mod call;
pub mod format;
pub mod io;
mod report;

pub use bh::bh_adjust;
pub use call::{call_de, Direction, TestResult};
pub use io::{load_conserved_list, load_counts_tsv, load_gene_list, ConservedLoad};
pub use report::{analyze, run_pipeline, EvaluationSummary, Report, ReportSummary, RunConfig};
