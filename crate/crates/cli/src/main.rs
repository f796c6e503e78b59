use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use scbn::normalization::{estimate_factor, GridConfig, Method};
use scbn::pipeline::format::{format_sig6, round_json};
use scbn::pipeline::io::{
    load_results_tsv, load_truth_tsv, write_counts_tsv, write_gene_list, write_truth_tsv,
};
use scbn::pipeline::{load_conserved_list, load_counts_tsv, run_pipeline, RunConfig};
use scbn::simulation::{
    evaluate_run, generate_dataset, ma_plot_points, preset, run_study, RateSource, SimConfig,
    StudySpec, PRESET_NAMES,
};

#[derive(Parser)]
#[command(
    name = "scbn",
    version,
    about = "Cross-species RNA-seq normalization and DE testing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the scaling factor and print it with the objective value.
    Normalize(NormalizeArgs),
    /// Normalize, test every ortholog and call DE genes.
    Test(TestArgs),
    /// Generate a synthetic dataset with known truth.
    Simulate(SimulateArgs),
    /// Run a replicated method comparison over a parameter sweep.
    Study(StudyArgs),
    /// Score a results table against truth labels.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Center of the coarse grid (default: median-method estimate).
    #[arg(long)]
    grid_center: Option<f64>,
    /// Multiplicative half-width of the coarse grid.
    #[arg(long)]
    grid_span: Option<f64>,
    /// Number of coarse grid points.
    #[arg(long)]
    grid_points: Option<usize>,
}

impl GridArgs {
    fn apply(&self, mut grid: GridConfig) -> GridConfig {
        if self.grid_center.is_some() {
            grid.center = self.grid_center;
        }
        if let Some(span) = self.grid_span {
            grid.span = span;
        }
        if let Some(points) = self.grid_points {
            grid.coarse_points = points;
        }
        grid
    }
}

#[derive(Args)]
struct InputArgs {
    /// Ortholog count table (TSV).
    #[arg(long)]
    counts: PathBuf,
    /// Conserved gene list, one id per line.
    #[arg(long)]
    conserved: PathBuf,
    #[arg(long, default_value = "scbn")]
    method: Method,
    /// Nominal level of the SCBN objective.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct NormalizeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// DE calling threshold on the raw p-value.
    #[arg(long, default_value_t = 1e-6)]
    cutoff: f64,
    /// Gene list whose DE calls are tallied separately.
    #[arg(long)]
    eval_list: Option<PathBuf>,
    /// Output prefix for `.summary.json` and `.results.tsv`; without it the
    /// results table goes to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON generator config; flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    orthologs: Option<usize>,
    #[arg(long)]
    de_rate: Option<f64>,
    #[arg(long)]
    fold: Option<f64>,
    #[arg(long)]
    up_rate_sp2: Option<f64>,
    #[arg(long)]
    conserved_size: Option<usize>,
    #[arg(long)]
    noise_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Count table whose normalized rates are resampled as expression levels.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Also write MA-plot coordinates at the true scaling factor.
    #[arg(long)]
    ma: bool,
    /// Output prefix.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct StudyArgs {
    /// JSON study spec.
    #[arg(long, conflicts_with = "preset")]
    spec: Option<PathBuf>,
    /// Built-in study (study1 … study7).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    /// Output prefix for `.rows.tsv`, `.overlaps.tsv` and `.json`.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Results table written by `test`.
    #[arg(long)]
    results: PathBuf,
    /// Truth labels written by `simulate`.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn pretty(mut value: serde_json::Value) -> Result<String> {
    round_json(&mut value);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            create_parent(path)?;
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn normalize(args: NormalizeArgs) -> Result<()> {
    let input = &args.input;
    let table = load_counts_tsv(&input.counts)?;
    let conserved = load_conserved_list(&input.conserved, &table)?;
    let grid = GridConfig {
        alpha: input.alpha,
        ..input.grid.apply(GridConfig::default())
    };
    grid.validate()?;
    let est = estimate_factor(&table, &conserved.set, input.method, &grid)?;
    let value = json!({
        "method": est.method,
        "scaling_factor": est.factor.value(),
        "objective": est.scbn.map(|s| s.objective),
        "grid_center": est.scbn.map(|s| s.center),
        "median_unfiltered_fallback": est.median.map(|m| m.unfiltered_fallback),
        "alpha": input.alpha,
        "conserved_genes": conserved.set.len(),
        "unknown_conserved_ids": conserved.unknown.len(),
    });
    emit(&pretty(value)?, args.output.as_deref())
}

fn test(args: TestArgs) -> Result<()> {
    let input = args.input;
    let config = RunConfig {
        method: input.method,
        alpha: input.alpha,
        cutoff: args.cutoff,
        counts: input.counts,
        conserved: input.conserved,
        eval_list: args.eval_list,
        output: args.output,
        grid: input.grid.apply(GridConfig::default()),
    };
    let report = run_pipeline(&config)?;
    if config.output.is_some() {
        io::stdout()
            .lock()
            .write_all(report.summary_json()?.as_bytes())?;
    } else {
        io::stdout()
            .lock()
            .write_all(report.results_tsv()?.as_bytes())?;
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut config: SimConfig = match &args.spec {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SimConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $flag:ident),*) => {$(if let Some(v) = args.$flag { config.$field = v; })*};
    }
    set!(n_orthologs <- orthologs, de_rate <- de_rate, fold <- fold, up_rate_sp2 <- up_rate_sp2,
         conserved_size <- conserved_size, noise_rate <- noise_rate, seed <- seed);
    if let Some(path) = &args.reference {
        config.rate_source = RateSource::from_table(&load_counts_tsv(path)?)?;
    }
    let data = generate_dataset(&config)?;

    let prefix = &args.output;
    create_parent(prefix)?;
    let mut counts = Vec::new();
    write_counts_tsv(&data.table, &mut counts)?;
    fs::write(with_suffix(prefix, ".counts.tsv"), counts)?;

    let ids: Vec<&str> = data
        .table
        .records()
        .iter()
        .map(|r| r.gene_id.as_str())
        .collect();
    let mut truth = Vec::new();
    write_truth_tsv(&ids, &data.truth, &mut truth)?;
    fs::write(with_suffix(prefix, ".truth.tsv"), truth)?;

    let mut conserved = Vec::new();
    write_gene_list(data.reported_conserved.gene_ids(), &mut conserved)?;
    fs::write(with_suffix(prefix, ".conserved.txt"), conserved)?;

    let (nulls, des) = data.null_de_counts();
    let conserved_de = data
        .reported_conserved
        .gene_ids()
        .iter()
        .filter(|id| data.label_of(id).is_some_and(|l| l.is_de()))
        .count();
    let meta = json!({
        "config": config,
        "true_c": data.true_c.value(),
        "rate_source": data.rate_source,
        "library_size_sp1": data.library_size_sp1,
        "library_size_sp2": data.library_size_sp2,
        "null_orthologs": nulls,
        "de_orthologs": des,
        "conserved_truth_de": conserved_de,
        "conserved_truth_null": data.reported_conserved.len() - conserved_de,
    });
    fs::write(with_suffix(prefix, ".meta.json"), pretty(meta)?)?;

    if args.ma {
        let plot = ma_plot_points(&data.table, data.true_c);
        let mut text = format!("# factor_line\t{}\n", format_sig6(plot.factor_line));
        text.push_str("gene_id\tA\tM\tlabel\n");
        for p in &plot.points {
            let label = data.label_of(&p.gene_id).map_or("NA", |l| l.as_str());
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                p.gene_id,
                format_sig6(p.a),
                format_sig6(p.m),
                label
            ));
        }
        fs::write(with_suffix(prefix, ".ma.tsv"), text)?;
    }
    Ok(())
}

fn study(args: StudyArgs) -> Result<()> {
    let mut spec: StudySpec = match (&args.spec, &args.preset) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, Some(name)) => match preset(name) {
            Some(spec) => spec,
            None => bail!(
                "unknown preset {name:?}; expected one of {}",
                PRESET_NAMES.join(", ")
            ),
        },
        (None, None) => bail!("either --spec or --preset is required"),
    };
    if let Some(r) = args.replicates {
        spec.replicates = r;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(cutoff) = args.cutoff {
        spec.cutoff = cutoff;
    }
    spec.grid = args.grid.apply(spec.grid);
    let result = run_study(&spec)?;

    match &args.output {
        Some(prefix) => {
            create_parent(prefix)?;
            fs::write(with_suffix(prefix, ".rows.tsv"), result.rows_tsv())?;
            fs::write(with_suffix(prefix, ".overlaps.tsv"), result.overlaps_tsv())?;
            let value = json!({ "spec": spec, "rows": result.rows, "overlaps": result.overlaps });
            fs::write(with_suffix(prefix, ".json"), pretty(value)?)?;
        }
        None => io::stdout()
            .lock()
            .write_all(result.rows_tsv().as_bytes())?,
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let results = load_results_tsv(&args.results)?;
    let truth = load_truth_tsv(&args.truth)?;
    let tested: Vec<_> = results.iter().filter(|r| r.is_testable()).collect();
    let keep: std::collections::HashSet<&str> = tested.iter().map(|r| r.gene_id.as_str()).collect();
    let metrics = evaluate_run(
        tested.iter().map(|r| (r.gene_id.as_str(), r.de_call)),
        truth
            .iter()
            .filter(|(id, _)| keep.contains(id.as_str()))
            .map(|(id, l)| (id.as_str(), *l)),
    )?;
    let value = json!({
        "genes": results.len(),
        "evaluated": tested.len(),
        "metrics": metrics,
    });
    emit(&pretty(value)?, args.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Normalize(a) => normalize(a),
        Command::Test(a) => test(a),
        Command::Simulate(a) => simulate(a),
        Command::Study(a) => study(a),
        Command::Evaluate(a) => evaluate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
