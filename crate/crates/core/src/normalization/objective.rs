use serde::{Deserialize, Serialize};

use crate::data::{ConservedSet, GeneRecord, OrthologTable, ScalingFactor};
use crate::error::{Error, Result};
use crate::exact_test::{gene_test_input, pvalue_below};

/// Distance between the empirical rejection rate of the conserved genes and
/// the nominal level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub deviation: f64,
    pub rejection_rate: f64,
    pub rejections: usize,
    pub tested: usize,
}

impl ObjectiveValue {
    fn new(rejections: usize, tested: usize, alpha: f64) -> Self {
        let rejection_rate = rejections as f64 / tested as f64;
        Self {
            deviation: (rejection_rate - alpha).abs(),
            rejection_rate,
            rejections,
            tested,
        }
    }
}

/// Testable conserved genes with the table totals, ready for repeated
/// objective evaluations.
#[derive(Debug, Clone)]
pub struct ConservedGenes<'a> {
    genes: Vec<&'a GeneRecord>,
    total_sp1: u64,
    total_sp2: u64,
}

impl<'a> ConservedGenes<'a> {
    /// Drops conserved genes without reads; errors if none remain.
    pub fn new(table: &'a OrthologTable, conserved: &'a ConservedSet) -> Result<Self> {
        let genes = conserved.testable_records(table);
        if genes.is_empty() {
            return Err(Error::NoTestableConservedGenes);
        }
        Ok(Self {
            genes,
            total_sp1: table.total_sp1(),
            total_sp2: table.total_sp2(),
        })
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn evaluate(&self, c: ScalingFactor, alpha: f64) -> Result<ObjectiveValue> {
        let mut rejections = 0;
        for gene in &self.genes {
            let input = gene_test_input(gene, c, self.total_sp1, self.total_sp2)?
                .expect("conserved genes are filtered to testable ones");
            if pvalue_below(&input, alpha) {
                rejections += 1;
            }
        }
        Ok(ObjectiveValue::new(rejections, self.genes.len(), alpha))
    }
}

/// `|(1/m) Σ_H I(p(c) < α) − α|` over the testable conserved genes.
pub fn empirical_type1_deviation(
    table: &OrthologTable,
    conserved: &ConservedSet,
    c: ScalingFactor,
    alpha: f64,
) -> Result<ObjectiveValue> {
    check_alpha(alpha)?;
    ConservedGenes::new(table, conserved)?.evaluate(c, alpha)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "alpha must lie in (0,1), got {alpha}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(records: Vec<GeneRecord>) -> OrthologTable {
        OrthologTable::validate(records).unwrap()
    }

    fn c1() -> ScalingFactor {
        ScalingFactor::new(1.0).unwrap()
    }

    #[test]
    fn balanced_genes_never_reject() {
        let recs: Vec<_> = (0..20)
            .map(|i| GeneRecord::new(format!("g{i}"), 500, 10 + i, 500, 10 + i))
            .collect();
        let t = table(recs);
        let h = ConservedSet::new(t.records().iter().map(|r| r.gene_id.clone()), &t).unwrap();
        let v = empirical_type1_deviation(&t, &h, c1(), 0.05).unwrap();
        assert_eq!(v.rejection_rate, 0.0);
        assert_eq!(v.deviation, 0.05);
    }

    #[test]
    fn nominal_rate_gives_zero_deviation() {
        // 5 of 100 genes are (50, 0): p = 2^-49 at c = 1.
        let mut recs: Vec<_> = (0..95)
            .map(|i| GeneRecord::new(format!("g{i}"), 500, 20, 500, 20))
            .collect();
        recs.extend((0..5).map(|i| GeneRecord::new(format!("d{i}"), 500, 50, 500, 0)));
        recs.push(GeneRecord::new("pad", 500, 0, 500, 250));
        let t = table(recs);
        let h = ConservedSet::new(
            t.records()
                .iter()
                .filter(|r| r.gene_id != "pad")
                .map(|r| r.gene_id.clone()),
            &t,
        )
        .unwrap();
        let v = empirical_type1_deviation(&t, &h, c1(), 0.05).unwrap();
        assert_eq!(v.rejections, 5);
        assert_eq!(v.tested, 100);
        assert_eq!(v.deviation, 0.0);
    }

    #[test]
    fn three_of_ten() {
        let mut recs: Vec<_> = (0..7)
            .map(|i| GeneRecord::new(format!("g{i}"), 500, 20, 500, 20))
            .collect();
        recs.extend((0..3).map(|i| GeneRecord::new(format!("d{i}"), 500, 50, 500, 0)));
        recs.push(GeneRecord::new("pad", 500, 0, 500, 150));
        let t = table(recs);
        let h = ConservedSet::new(
            t.records()
                .iter()
                .filter(|r| r.gene_id != "pad")
                .map(|r| r.gene_id.clone()),
            &t,
        )
        .unwrap();
        let v = empirical_type1_deviation(&t, &h, c1(), 0.05).unwrap();
        assert!((v.deviation - 0.25).abs() < 1e-15);
    }

    #[test]
    fn untestable_conserved_genes_are_dropped() {
        let t = table(vec![
            GeneRecord::new("a", 100, 0, 100, 0),
            GeneRecord::new("b", 100, 5, 100, 5),
        ]);
        let h = ConservedSet::new(["a", "b"], &t).unwrap();
        let v = empirical_type1_deviation(&t, &h, c1(), 0.05).unwrap();
        assert_eq!(v.tested, 1);

        let h = ConservedSet::new(["a"], &t).unwrap();
        assert_eq!(
            empirical_type1_deviation(&t, &h, c1(), 0.05).unwrap_err(),
            Error::NoTestableConservedGenes
        );
    }

    #[test]
    fn repeated_evaluation_is_bit_identical() {
        let recs: Vec<_> = (0..50)
            .map(|i| {
                GeneRecord::new(
                    format!("g{i}"),
                    300 + i * 7,
                    i * 3 % 17,
                    900 - i,
                    i % 11 + 1,
                )
            })
            .collect();
        let t = table(recs);
        let h = ConservedSet::new(t.records().iter().map(|r| r.gene_id.clone()), &t).unwrap();
        let c = ScalingFactor::new(1.37).unwrap();
        let a = empirical_type1_deviation(&t, &h, c, 0.05).unwrap();
        let b = empirical_type1_deviation(&t, &h, c, 0.05).unwrap();
        assert_eq!(a.deviation.to_bits(), b.deviation.to_bits());
    }
}
