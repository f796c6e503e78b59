#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};

use scbn::{ConservedSet, GeneRecord, OrthologTable};

/// Two-sided exact p-value by walking every outcome, with masses built
/// from running products rather than log-gamma.
pub fn enumerate_pvalue(x1: u64, n: u64, p0: f64) -> f64 {
    let mean = n as f64 * p0;
    let dist = (x1 as f64 - mean).abs();
    let slack = (1e-7 * n as f64).min(1e-3);
    let q0 = 1.0 - p0;
    let mut coef = 1.0f64;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            coef = coef * (n - k + 1) as f64 / k as f64;
        }
        if (k as f64 - mean).abs() >= dist - slack {
            total += coef * p0.powi(k as i32) * q0.powi((n - k) as i32);
        }
    }
    total.min(1.0)
}

/// Step-up BH by brute force: each q is the smallest `p_j·m/rank_j` over
/// all `p_j ≥ p_i`, with ties sharing the largest rank.
pub fn brute_force_bh(p: &[f64]) -> Vec<f64> {
    let m = p.len() as f64;
    p.iter()
        .map(|&pi| {
            p.iter()
                .filter(|&&pj| pj >= pi)
                .map(|&pj| {
                    let rank = p.iter().filter(|&&pl| pl <= pj).count() as f64;
                    (pj * m / rank).min(1.0)
                })
                .fold(1.0, f64::min)
        })
        .collect()
}

/// A table of `n_null` null genes whose species-1/species-2 rate ratio
/// matches scaling factor `c_true` under equal depths, padded with
/// species-2-only genes so both totals come out near `depth`.
/// Returns the table, the null genes as conserved set, and the factor
/// that is exactly null for the realized totals.
pub fn null_table(
    n_null: usize,
    c_true: f64,
    depth: f64,
    equal_lengths: bool,
    seed: u64,
) -> (OrthologTable, ConservedSet, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rates = LogNormal::new(0.0, 1.5).unwrap();
    let mut genes = Vec::with_capacity(n_null + 200);
    let mut weights = Vec::with_capacity(n_null);
    for _ in 0..n_null {
        let (l1, l2) = if equal_lengths {
            (1000, 1000)
        } else {
            (
                rng.random_range(200..=10_200),
                rng.random_range(200..=10_200),
            )
        };
        let mu: f64 = rates.sample(&mut rng);
        weights.push((mu, l1, l2));
    }
    let total1: f64 = weights.iter().map(|&(mu, l1, _)| mu * l1 as f64).sum();
    let mut sum2 = 0.0;
    let mut records = Vec::new();
    for (i, &(mu, l1, l2)) in weights.iter().enumerate() {
        let lambda1 = depth * mu * l1 as f64 / total1;
        let lambda2 = depth * mu * l2 as f64 / total1 / c_true;
        sum2 += lambda2;
        let x1 = Poisson::new(lambda1).unwrap().sample(&mut rng) as u64;
        let x2 = Poisson::new(lambda2).unwrap().sample(&mut rng) as u64;
        records.push(GeneRecord::new(format!("null_{i:05}"), l1, x1, l2, x2));
        genes.push(format!("null_{i:05}"));
    }
    let filler = 200;
    let per_filler = ((depth - sum2) / filler as f64).max(1.0);
    for i in 0..filler {
        let x2 = Poisson::new(per_filler).unwrap().sample(&mut rng) as u64;
        records.push(GeneRecord::new(format!("fill_{i:03}"), 1000, 0, 1000, x2));
    }
    let table = OrthologTable::validate(records).unwrap();
    let set = ConservedSet::new(genes, &table).unwrap();
    // λ1/λ2 = c·N1/N2 defines the exact null factor at the realized totals.
    let c_eff = c_true * table.total_sp2() as f64 / table.total_sp1() as f64;
    (table, set, c_eff)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
