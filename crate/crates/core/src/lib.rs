//! Normalization and differential expression testing of RNA-seq read counts
//! between two species.
//!
//! Orthologous genes are compared with an exact conditional binomial test
//! whose null success probability accounts for gene lengths, sequencing
//! depths and the between-species scaling factor. The factor is estimated
//! from a set of conserved orthologs by matching their empirical rejection
//! rate to the nominal level, or by the interquartile median baseline.

pub mod binomial;
pub mod data;
pub mod error;
pub mod normalization;
pub mod pipeline;
pub mod simulation;

pub use data::{ConservedSet, GeneRecord, OrthologTable, ScalingFactor};
pub use error::{Error, Result};
