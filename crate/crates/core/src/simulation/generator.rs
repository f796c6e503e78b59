use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use super::config::{RateSource, SimConfig};
use crate::data::{ConservedSet, GeneRecord, OrthologTable, ScalingFactor};
use crate::error::{Error, Result};

/// True status of a simulated ortholog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthLabel {
    Null,
    DeUpSp1,
    DeUpSp2,
    UniqueSp1,
    UniqueSp2,
}

impl TruthLabel {
    /// Every non-null gene differs in expression between the species.
    pub fn is_de(self) -> bool {
        self != TruthLabel::Null
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TruthLabel::Null => "null",
            TruthLabel::DeUpSp1 => "de_up_sp1",
            TruthLabel::DeUpSp2 => "de_up_sp2",
            TruthLabel::UniqueSp1 => "unique_sp1",
            TruthLabel::UniqueSp2 => "unique_sp2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "null" => TruthLabel::Null,
            "de_up_sp1" => TruthLabel::DeUpSp1,
            "de_up_sp2" => TruthLabel::DeUpSp2,
            "unique_sp1" => TruthLabel::UniqueSp1,
            "unique_sp2" => TruthLabel::UniqueSp2,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulatedDataset {
    pub table: OrthologTable,
    /// Labels aligned with `table.records()`.
    pub truth: Vec<TruthLabel>,
    pub reported_conserved: ConservedSet,
    /// `Σ μ₂L₂ / Σ μ₁L₁` over the table genes, from the generator's own draws.
    pub true_c: ScalingFactor,
    /// Table totals plus the reads of unmapped genes.
    pub library_size_sp1: u64,
    pub library_size_sp2: u64,
    pub rate_source: String,
}

impl SimulatedDataset {
    pub fn label_of(&self, gene_id: &str) -> Option<TruthLabel> {
        self.table.position(gene_id).map(|i| self.truth[i])
    }

    /// (n₀, n₁): null and differentially expressed orthologs, unique genes excluded.
    pub fn null_de_counts(&self) -> (usize, usize) {
        let n0 = self
            .truth
            .iter()
            .filter(|&&l| l == TruthLabel::Null)
            .count();
        let n1 = self
            .truth
            .iter()
            .filter(|&&l| matches!(l, TruthLabel::DeUpSp1 | TruthLabel::DeUpSp2))
            .count();
        (n0, n1)
    }
}

enum RateSampler<'a> {
    LogNormal(LogNormal<f64>),
    Empirical(&'a [f64]),
}

impl RateSampler<'_> {
    fn new(source: &RateSource) -> Result<RateSampler<'_>> {
        Ok(match source {
            RateSource::LogNormal { log_mean, log_sd } => RateSampler::LogNormal(
                LogNormal::new(*log_mean, *log_sd)
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?,
            ),
            RateSource::Empirical { rates } => RateSampler::Empirical(rates),
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            RateSampler::LogNormal(d) => d.sample(rng),
            RateSampler::Empirical(rates) => rates[rng.random_range(0..rates.len())],
        }
    }
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::Domain(format!("poisson mean {mean}: {e}")))?;
    Ok(d.sample(rng) as u64)
}

struct Gene {
    id: String,
    label: TruthLabel,
    mu1: f64,
    mu2: f64,
    len1: u64,
    len2: u64,
}

/// Draws one labeled two-species dataset. The same config (seed included)
/// always produces the same dataset.
pub fn generate_dataset(config: &SimConfig) -> Result<SimulatedDataset> {
    config.validate()?;
    let n_de = config.n_de();
    let (conserved_null, conserved_de) = config.conserved_split();
    if conserved_null > config.n_orthologs - n_de {
        return Err(Error::InvalidConfig(format!(
            "conserved set needs {conserved_null} null orthologs but only {} exist",
            config.n_orthologs - n_de
        )));
    }
    if conserved_de > n_de {
        return Err(Error::InvalidConfig(format!(
            "conserved set needs {conserved_de} DE orthologs but only {n_de} exist"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rates = RateSampler::new(&config.rate_source)?;
    let length = |rng: &mut ChaCha8Rng| rng.random_range(config.length_min..=config.length_max);

    // Which orthologs are DE, and in which direction.
    let n_up_sp2 = (config.up_rate_sp2 * n_de as f64).round() as usize;
    let mut labels = vec![TruthLabel::Null; config.n_orthologs];
    for (rank, idx) in sample(&mut rng, config.n_orthologs, n_de)
        .into_iter()
        .enumerate()
    {
        labels[idx] = if rank < n_up_sp2 {
            TruthLabel::DeUpSp2
        } else {
            TruthLabel::DeUpSp1
        };
    }

    let width = (config.n_orthologs + config.n_unique_sp1 + config.n_unique_sp2)
        .to_string()
        .len();
    let mut genes =
        Vec::with_capacity(config.n_orthologs + config.n_unique_sp1 + config.n_unique_sp2);
    for (i, &label) in labels.iter().enumerate() {
        let mu1 = rates.draw(&mut rng);
        let mu2 = match label {
            TruthLabel::DeUpSp2 => mu1 * config.fold,
            TruthLabel::DeUpSp1 => mu1 / config.fold,
            _ => mu1,
        };
        genes.push(Gene {
            id: format!("ortho_{:0width$}", i + 1),
            label,
            mu1,
            mu2,
            len1: length(&mut rng),
            len2: length(&mut rng),
        });
    }
    for (label, count, prefix) in [
        (TruthLabel::UniqueSp1, config.n_unique_sp1, "unique1"),
        (TruthLabel::UniqueSp2, config.n_unique_sp2, "unique2"),
    ] {
        for i in 0..count {
            let mu = rates.draw(&mut rng);
            let (mu1, mu2) = if label == TruthLabel::UniqueSp1 {
                (mu, 0.0)
            } else {
                (0.0, mu)
            };
            genes.push(Gene {
                id: format!("{prefix}_{:0width$}", i + 1),
                label,
                mu1,
                mu2,
                len1: length(&mut rng),
                len2: length(&mut rng),
            });
        }
    }

    let unmapped_sp1: Vec<f64> = (0..config.n_unmapped_sp1)
        .map(|_| rates.draw(&mut rng) * length(&mut rng) as f64)
        .collect();
    let unmapped_sp2: Vec<f64> = (0..config.n_unmapped_sp2)
        .map(|_| rates.draw(&mut rng) * length(&mut rng) as f64)
        .collect();

    let output_sp1: f64 = genes.iter().map(|g| g.mu1 * g.len1 as f64).sum();
    let output_sp2: f64 = genes.iter().map(|g| g.mu2 * g.len2 as f64).sum();
    if !(output_sp1 > 0.0 && output_sp2 > 0.0) {
        return Err(Error::InvalidConfig(
            "total expression output is zero in a species".into(),
        ));
    }
    let library_output_sp1 = output_sp1 + unmapped_sp1.iter().sum::<f64>();
    let library_output_sp2 = output_sp2 + unmapped_sp2.iter().sum::<f64>();
    let scale_sp1 = config.depth_sp1 / library_output_sp1;
    let scale_sp2 = config.depth_sp2 / library_output_sp2;

    let mut records = Vec::with_capacity(genes.len());
    for g in &genes {
        let x1 = poisson(&mut rng, scale_sp1 * g.mu1 * g.len1 as f64)?;
        let x2 = poisson(&mut rng, scale_sp2 * g.mu2 * g.len2 as f64)?;
        records.push(GeneRecord::new(g.id.clone(), g.len1, x1, g.len2, x2));
    }
    let mut unmapped_reads_sp1 = 0;
    for out in &unmapped_sp1 {
        unmapped_reads_sp1 += poisson(&mut rng, scale_sp1 * out)?;
    }
    let mut unmapped_reads_sp2 = 0;
    for out in &unmapped_sp2 {
        unmapped_reads_sp2 += poisson(&mut rng, scale_sp2 * out)?;
    }

    // Reported conserved set: nulls plus secretly DE orthologs.
    let null_pool: Vec<usize> = (0..config.n_orthologs)
        .filter(|&i| labels[i] == TruthLabel::Null)
        .collect();
    let de_pool: Vec<usize> = (0..config.n_orthologs)
        .filter(|&i| labels[i].is_de())
        .collect();
    let mut chosen: Vec<usize> = sample(&mut rng, null_pool.len(), conserved_null)
        .into_iter()
        .map(|i| null_pool[i])
        .chain(
            sample(&mut rng, de_pool.len(), conserved_de)
                .into_iter()
                .map(|i| de_pool[i]),
        )
        .collect();
    chosen.shuffle(&mut rng);

    let table = OrthologTable::validate(records)?;
    let reported_conserved =
        ConservedSet::new(chosen.iter().map(|&i| genes[i].id.clone()), &table)?;
    Ok(SimulatedDataset {
        library_size_sp1: table.total_sp1() + unmapped_reads_sp1,
        library_size_sp2: table.total_sp2() + unmapped_reads_sp2,
        true_c: ScalingFactor::new(output_sp2 / output_sp1)?,
        truth: genes.iter().map(|g| g.label).collect(),
        reported_conserved,
        table,
        rate_source: config.rate_source.describe(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig {
            n_orthologs: 2000,
            n_unique_sp1: 100,
            n_unique_sp2: 200,
            n_unmapped_sp1: 200,
            n_unmapped_sp2: 400,
            conserved_size: 100,
            ..Default::default()
        }
    }

    #[test]
    fn same_seed_same_dataset() {
        let a = generate_dataset(&small()).unwrap();
        let b = generate_dataset(&small()).unwrap();
        assert_eq!(a, b);
        let c = generate_dataset(&SimConfig { seed: 2, ..small() }).unwrap();
        assert_ne!(a.table, c.table);
    }

    #[test]
    fn label_accounting() {
        let cfg = SimConfig {
            de_rate: 0.25,
            up_rate_sp2: 0.8,
            ..small()
        };
        let d = generate_dataset(&cfg).unwrap();
        let (n0, n1) = d.null_de_counts();
        assert_eq!(n1, 500);
        assert_eq!(n0 + n1, 2000);
        assert_eq!(d.table.len(), 2000 + 100 + 200);
        let up2 = d
            .truth
            .iter()
            .filter(|&&l| l == TruthLabel::DeUpSp2)
            .count();
        assert_eq!(up2, 400);
        let uniq1 = d
            .truth
            .iter()
            .filter(|&&l| l == TruthLabel::UniqueSp1)
            .count();
        assert_eq!(uniq1, 100);
    }

    #[test]
    fn unique_genes_have_no_reads_in_the_other_species() {
        let d = generate_dataset(&small()).unwrap();
        for (rec, label) in d.table.records().iter().zip(&d.truth) {
            match label {
                TruthLabel::UniqueSp1 => assert_eq!(rec.count_sp2, 0),
                TruthLabel::UniqueSp2 => assert_eq!(rec.count_sp1, 0),
                _ => {}
            }
        }
    }

    #[test]
    fn conserved_noise_fraction() {
        let cfg = SimConfig {
            noise_rate: 0.3,
            ..small()
        };
        let d = generate_dataset(&cfg).unwrap();
        assert_eq!(d.reported_conserved.len(), 100);
        let noisy = d
            .reported_conserved
            .gene_ids()
            .iter()
            .filter(|id| d.label_of(id).unwrap().is_de())
            .count();
        assert_eq!(noisy, 30);
        for id in d.reported_conserved.gene_ids() {
            let l = d.label_of(id).unwrap();
            assert!(!matches!(l, TruthLabel::UniqueSp1 | TruthLabel::UniqueSp2));
        }
    }

    #[test]
    fn library_includes_unmapped_reads() {
        let d = generate_dataset(&small()).unwrap();
        assert!(d.library_size_sp1 > d.table.total_sp1());
        assert!(d.library_size_sp2 > d.table.total_sp2());
        let depth = d.library_size_sp1 as f64;
        assert!((depth - 1e6).abs() < 5e3, "{depth}");
    }

    #[test]
    fn degenerate_configs() {
        assert!(generate_dataset(&SimConfig {
            n_orthologs: 0,
            ..small()
        })
        .is_err());
        // 10% of 2000 = 200 DE orthologs cannot fill 60% of a 1000-gene set.
        let cfg = SimConfig {
            conserved_size: 1000,
            noise_rate: 0.6,
            ..small()
        };
        assert!(matches!(
            generate_dataset(&cfg),
            Err(Error::InvalidConfig(_))
        ));
        let cfg = SimConfig {
            conserved_size: 1900,
            ..small()
        };
        assert!(generate_dataset(&cfg).is_err());
    }

    #[test]
    fn true_c_from_draws() {
        // With no unique genes and no DE, S2/S1 only differs through lengths.
        let cfg = SimConfig {
            de_rate: 0.0,
            n_unique_sp1: 0,
            n_unique_sp2: 0,
            ..small()
        };
        let d = generate_dataset(&cfg).unwrap();
        let c = d.true_c.value();
        assert!(c > 0.9 && c < 1.1, "{c}");
    }

    #[test]
    fn empirical_rate_source() {
        let cfg = SimConfig {
            rate_source: RateSource::Empirical {
                rates: vec![1.0, 2.0, 4.0],
            },
            ..small()
        };
        let d = generate_dataset(&cfg).unwrap();
        assert!(d.rate_source.starts_with("empirical"));
        let again = RateSource::from_table(&d.table).unwrap();
        assert!(matches!(again, RateSource::Empirical { ref rates } if !rates.is_empty()));
    }
}
