use serde::{Deserialize, Serialize};

use crate::data::{OrthologTable, ScalingFactor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaPoint {
    pub gene_id: String,
    /// `½·log₂(e₁·e₂)`
    pub a: f64,
    /// `log₂(e₁/e₂)`
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaPlot {
    pub points: Vec<MaPoint>,
    /// `log₂(c)`: where the normalization puts the non-DE genes.
    pub factor_line: f64,
    /// Genes left out for having no reads in a species.
    pub skipped: usize,
}

/// M/A coordinates of the length- and depth-normalized expressions
/// `e_t = count_t / (length_t · N_t)`, in table order.
pub fn ma_plot_points(table: &OrthologTable, c: ScalingFactor) -> MaPlot {
    let n1 = table.total_sp1() as f64;
    let n2 = table.total_sp2() as f64;
    let mut points = Vec::with_capacity(table.len());
    let mut skipped = 0;
    for rec in table.records() {
        if rec.count_sp1 == 0 || rec.count_sp2 == 0 {
            skipped += 1;
            continue;
        }
        let e1 = rec.count_sp1 as f64 / (rec.length_sp1 as f64 * n1);
        let e2 = rec.count_sp2 as f64 / (rec.length_sp2 as f64 * n2);
        points.push(MaPoint {
            gene_id: rec.gene_id.clone(),
            a: 0.5 * (e1 * e2).log2(),
            m: (e1 / e2).log2(),
        });
    }
    MaPlot {
        points,
        factor_line: c.value().log2(),
        skipped,
    }
}
