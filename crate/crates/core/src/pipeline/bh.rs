use crate::error::{Error, Result};

/// Benjamini–Hochberg step-up adjustment, `q_(i) = min_{j ≥ i} p_(j)·m/j`
/// clipped at 1, returned in input order. `None` entries (untestable genes)
/// pass through and do not count towards `m`.
pub fn bh_adjust(pvalues: &[Option<f64>]) -> Result<Vec<Option<f64>>> {
    let mut order: Vec<usize> = Vec::with_capacity(pvalues.len());
    for (i, p) in pvalues.iter().enumerate() {
        if let Some(p) = *p {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Domain(format!(
                    "p-value {p} at position {i} is outside (0,1]"
                )));
            }
            order.push(i);
        }
    }
    order.sort_by(|&a, &b| {
        pvalues[a]
            .unwrap()
            .total_cmp(&pvalues[b].unwrap())
            .then(a.cmp(&b))
    });

    let m = order.len() as f64;
    let mut q = vec![None; pvalues.len()];
    let mut running = 1.0f64;
    for (rank, &idx) in order.iter().enumerate().rev() {
        let p = pvalues[idx].unwrap();
        running = running.min(p * m / (rank + 1) as f64);
        q[idx] = Some(running.max(p));
    }
    Ok(q)
}
