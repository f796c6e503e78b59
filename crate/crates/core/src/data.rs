//! Ortholog table, conserved gene set and scaling factor.
//!
//! Everything here is immutable once validated, so tables can be shared
//! freely between threads.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One one-to-one orthologous gene observed in both species.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneRecord {
    pub gene_id: String,
    pub length_sp1: u64,
    pub length_sp2: u64,
    pub count_sp1: u64,
    pub count_sp2: u64,
}

impl GeneRecord {
    pub fn new(
        gene_id: impl Into<String>,
        length_sp1: u64,
        count_sp1: u64,
        length_sp2: u64,
        count_sp2: u64,
    ) -> Self {
        Self {
            gene_id: gene_id.into(),
            length_sp1,
            length_sp2,
            count_sp1,
            count_sp2,
        }
    }

    /// Conditional total `x1 + x2` the exact test conditions on.
    pub fn total_count(&self) -> u64 {
        self.count_sp1 + self.count_sp2
    }

    /// A gene with no reads in either species carries no evidence and is
    /// never tested.
    pub fn is_testable(&self) -> bool {
        self.total_count() > 0
    }

    /// Same gene with the two species exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            gene_id: self.gene_id.clone(),
            length_sp1: self.length_sp2,
            length_sp2: self.length_sp1,
            count_sp1: self.count_sp2,
            count_sp2: self.count_sp1,
        }
    }
}

/// Validated set of orthologs plus per-species total read counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthologTable {
    records: Vec<GeneRecord>,
    total_sp1: u64,
    total_sp2: u64,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl OrthologTable {
    /// Validates raw records and computes the per-species totals.
    ///
    /// Genes with zero counts in both species are kept (they contribute
    /// nothing to the totals) and reported as untestable by
    /// [`GeneRecord::is_testable`].
    pub fn validate(records: Vec<GeneRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        let mut total_sp1: u64 = 0;
        let mut total_sp2: u64 = 0;
        for (i, rec) in records.iter().enumerate() {
            if rec.length_sp1 == 0 || rec.length_sp2 == 0 {
                return Err(Error::InvalidLength(rec.gene_id.clone()));
            }
            if index.insert(rec.gene_id.clone(), i).is_some() {
                return Err(Error::DuplicateGeneId(rec.gene_id.clone()));
            }
            total_sp1 = total_sp1
                .checked_add(rec.count_sp1)
                .ok_or_else(|| Error::Domain("species 1 total overflows u64".into()))?;
            total_sp2 = total_sp2
                .checked_add(rec.count_sp2)
                .ok_or_else(|| Error::Domain("species 2 total overflows u64".into()))?;
        }
        if total_sp1 == 0 {
            return Err(Error::ZeroTotal(1));
        }
        if total_sp2 == 0 {
            return Err(Error::ZeroTotal(2));
        }
        Ok(Self {
            records,
            total_sp1,
            total_sp2,
            index,
        })
    }

    pub fn records(&self) -> &[GeneRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<GeneRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// N₁, the total orthologous reads of species 1.
    pub fn total_sp1(&self) -> u64 {
        self.total_sp1
    }

    /// N₂, the total orthologous reads of species 2.
    pub fn total_sp2(&self) -> u64 {
        self.total_sp2
    }

    pub fn get(&self, gene_id: &str) -> Option<&GeneRecord> {
        self.index.get(gene_id).map(|&i| &self.records[i])
    }

    pub fn position(&self, gene_id: &str) -> Option<usize> {
        self.index.get(gene_id).copied()
    }

    pub fn contains(&self, gene_id: &str) -> bool {
        self.index.contains_key(gene_id)
    }

    pub fn untestable_count(&self) -> usize {
        self.records.iter().filter(|r| !r.is_testable()).count()
    }

    /// Table with species 1 and species 2 exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            records: self.records.iter().map(GeneRecord::swapped).collect(),
            total_sp1: self.total_sp2,
            total_sp2: self.total_sp1,
            index: self.index.clone(),
        }
    }
}

/// The conserved orthologs H assumed to be non-differentially expressed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservedSet {
    gene_ids: Vec<String>,
}

impl ConservedSet {
    /// Builds the set, dropping repeated ids while keeping first-seen order.
    pub fn new<I, S>(gene_ids: I, table: &OrthologTable) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut ids = Vec::new();
        for id in gene_ids {
            let id = id.into();
            if !table.contains(&id) {
                return Err(Error::UnknownConservedGene(id));
            }
            if seen.insert(id.clone()) {
                ids.push(id);
            }
        }
        if ids.is_empty() {
            return Err(Error::EmptyConservedSet);
        }
        Ok(Self { gene_ids: ids })
    }

    pub fn gene_ids(&self) -> &[String] {
        &self.gene_ids
    }

    /// m, the number of conserved genes.
    pub fn len(&self) -> usize {
        self.gene_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gene_ids.is_empty()
    }

    /// Conserved records that carry at least one read.
    pub fn testable_records<'a>(&'a self, table: &'a OrthologTable) -> Vec<&'a GeneRecord> {
        self.gene_ids
            .iter()
            .filter_map(|id| table.get(id))
            .filter(|r| r.is_testable())
            .collect()
    }
}

/// Ratio c = S₂/S₁ of total expression output between the two species.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ScalingFactor(f64);

impl ScalingFactor {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Self(c))
        } else {
            Err(Error::Domain(format!(
                "scaling factor must be positive and finite, got {c}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn inverse(self) -> Self {
        Self(1.0 / self.0)
    }
}

impl TryFrom<f64> for ScalingFactor {
    type Error = Error;

    fn try_from(c: f64) -> Result<Self> {
        Self::new(c)
    }
}

impl From<ScalingFactor> for f64 {
    fn from(c: ScalingFactor) -> f64 {
        c.0
    }
}
