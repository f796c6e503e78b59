use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn scbn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scbn"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SMALL: &str = r#"{"n_orthologs": 2000, "n_unique_sp1": 100, "n_unique_sp2": 200,
  "n_unmapped_sp1": 200, "n_unmapped_sp2": 400, "conserved_size": 200, "noise_rate": 0.2, "fold": 1.5, "seed": 4}"#;

fn simulate(dir: &Path) {
    fs::write(dir.join("sim.json"), SMALL).unwrap();
    ok(&scbn(
        &[
            "simulate", "--spec", "sim.json", "--ma", "--output", "data/sim",
        ],
        dir,
    ));
}

#[test]
fn simulate_writes_dataset_files() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path());
    let d = dir.path().join("data");
    let counts = fs::read_to_string(d.join("sim.counts.tsv")).unwrap();
    assert!(counts.starts_with("gene_id\tlength_sp1\tcount_sp1\tlength_sp2\tcount_sp2\n"));
    assert_eq!(counts.lines().count(), 1 + 2300);
    assert_eq!(
        fs::read_to_string(d.join("sim.truth.tsv"))
            .unwrap()
            .lines()
            .count(),
        1 + 2300
    );
    assert_eq!(
        fs::read_to_string(d.join("sim.conserved.txt"))
            .unwrap()
            .lines()
            .count(),
        200
    );
    assert!(fs::read_to_string(d.join("sim.ma.tsv"))
        .unwrap()
        .starts_with("# factor_line\t"));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("sim.meta.json")).unwrap()).unwrap();
    assert!(meta["true_c"].as_f64().unwrap() > 0.0);
    assert_eq!(meta["conserved_truth_de"], 40);
    assert_eq!(meta["config"]["seed"], 4);
    assert!(meta["rate_source"]
        .as_str()
        .unwrap()
        .starts_with("log-normal"));

    // flags override the spec and a rerun is byte-identical
    ok(&scbn(
        &[
            "simulate", "--spec", "sim.json", "--seed", "4", "--output", "again",
        ],
        dir.path(),
    ));
    assert_eq!(
        fs::read(d.join("sim.counts.tsv")).unwrap(),
        fs::read(dir.path().join("again.counts.tsv")).unwrap()
    );
}

#[test]
fn normalize_test_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    simulate(p);
    let grid = ["--grid-points", "200", "--grid-span", "4"];
    let base = [
        "--counts",
        "data/sim.counts.tsv",
        "--conserved",
        "data/sim.conserved.txt",
    ];

    let norm: serde_json::Value =
        serde_json::from_str(&ok(&scbn(&[&["normalize"][..], &base, &grid].concat(), p))).unwrap();
    let c = norm["scaling_factor"].as_f64().unwrap();
    assert!(c > 0.5 && c < 2.0);
    assert_eq!(norm["method"], "scbn");

    let median: serde_json::Value = serde_json::from_str(&ok(&scbn(
        &[&["normalize", "--method", "median"][..], &base].concat(),
        p,
    )))
    .unwrap();
    assert_eq!(median["method"], "median");
    assert!(median["objective"].is_null());

    let summary: serde_json::Value = serde_json::from_str(&ok(&scbn(
        &[
            &["test", "--cutoff", "0.01", "--output", "out/run"][..],
            &base,
            &grid,
        ]
        .concat(),
        p,
    )))
    .unwrap();
    assert_eq!(summary["scaling_factor"].as_f64().unwrap(), c);
    let total = summary["total_de"].as_u64().unwrap();
    assert_eq!(
        total,
        summary["higher_sp1"].as_u64().unwrap() + summary["higher_sp2"].as_u64().unwrap()
    );

    let results = fs::read_to_string(p.join("out/run.results.tsv")).unwrap();
    assert_eq!(
        results.lines().next().unwrap(),
        "gene_id\tp_value\tq_value\tdirection\tde_call"
    );
    let stdout_results = ok(&scbn(
        &[&["test", "--cutoff", "0.01"][..], &base, &grid].concat(),
        p,
    ));
    assert_eq!(stdout_results, results);

    let eval: serde_json::Value = serde_json::from_str(&ok(&scbn(
        &[
            "evaluate",
            "--results",
            "out/run.results.tsv",
            "--truth",
            "data/sim.truth.tsv",
        ],
        p,
    )))
    .unwrap();
    let m = &eval["metrics"];
    assert_eq!(
        m["true_positives"].as_u64().unwrap() + m["false_discoveries"].as_u64().unwrap(),
        total
    );
}

#[test]
fn study_from_spec_and_preset_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let spec = format!(
        r#"{{"name": "tiny", "base": {SMALL}, "replicates": 2, "seed": 3,
            "sweep": {{"parameter": "noise_rate", "values": [0.0, 0.4]}},
            "grid": {{"coarse_points": 100, "refine_rounds": 1}}}}"#
    );
    fs::write(p.join("study.json"), spec).unwrap();
    ok(&scbn(
        &["study", "--spec", "study.json", "--output", "res/tiny"],
        p,
    ));
    let rows = fs::read_to_string(p.join("res/tiny.rows.tsv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 4);
    assert!(rows
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("noise_rate\t0\tscbn\t2\t"));
    assert_eq!(
        fs::read_to_string(p.join("res/tiny.overlaps.tsv"))
            .unwrap()
            .lines()
            .count(),
        1 + 2
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(p.join("res/tiny.json")).unwrap()).unwrap();
    assert_eq!(json["spec"]["replicates"], 2);

    let out = scbn(&["study", "--preset", "study9"], p);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
    assert_eq!(scbn(&["study"], p).status.code(), Some(1));
}

#[test]
fn failures_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("bad.tsv"),
        "gene_id\tlength_sp1\tcount_sp1\tlength_sp2\tcount_sp2\ng1\t100\tx\t100\t4\n",
    )
    .unwrap();
    fs::write(p.join("c.txt"), "g1\n").unwrap();
    let out = scbn(&["test", "--counts", "bad.tsv", "--conserved", "c.txt"], p);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line 2"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = scbn(
        &[
            "normalize",
            "--counts",
            "missing.tsv",
            "--conserved",
            "c.txt",
        ],
        p,
    );
    assert_eq!(out.status.code(), Some(1));
    let out = scbn(&["simulate", "--noise-rate", "1.5", "--output", "x"], p);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_from_reference_table() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    simulate(p);
    ok(&scbn(
        &[
            "simulate",
            "--reference",
            "data/sim.counts.tsv",
            "--orthologs",
            "500",
            "--conserved-size",
            "50",
            "--output",
            "ref",
        ],
        p,
    ));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(p.join("ref.meta.json")).unwrap()).unwrap();
    assert!(
        meta["rate_source"]
            .as_str()
            .unwrap()
            .starts_with("empirical"),
        "{}",
        meta["rate_source"]
    );
    assert_eq!(meta["config"]["n_orthologs"], 500);
}
