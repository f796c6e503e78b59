//! Tab-separated count tables, gene lists and result files.
//!
//! Count tables carry the tab-separated header columns `gene_id`,
//! `length_sp1`, `count_sp1`, `length_sp2`, `count_sp2` and one gene per
//! line. Gene lists are one id per line; blank lines and lines starting with
//! `#` are ignored.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::call::TestResult;
use super::format::format_exact;
use crate::data::{ConservedSet, GeneRecord, OrthologTable};
use crate::error::{Error, Result};
use crate::simulation::TruthLabel;

pub const COUNTS_HEADER: [&str; 5] = [
    "gene_id",
    "length_sp1",
    "count_sp1",
    "length_sp2",
    "count_sp2",
];
pub const RESULTS_HEADER: [&str; 5] = ["gene_id", "p_value", "q_value", "direction", "de_call"];

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn tsv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .quoting(false)
        .flexible(true)
        .from_reader(reader)
}

fn parse_int(field: &str, name: &str, line: u64) -> Result<u64> {
    field.trim().parse::<u64>().map_err(|_| {
        parse_err(
            line,
            format!("{name} must be a non-negative integer, got `{field}`"),
        )
    })
}

pub fn parse_counts_tsv<R: Read>(reader: R) -> Result<OrthologTable> {
    let mut rdr = tsv_reader(reader);
    let mut records = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    let mut header_seen = false;
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if !header_seen {
            let fields: Vec<&str> = row.iter().map(str::trim).collect();
            if fields != COUNTS_HEADER {
                return Err(parse_err(
                    line,
                    format!("expected header `{}`", COUNTS_HEADER.join("\t")),
                ));
            }
            header_seen = true;
            continue;
        }
        if row.len() == 1 && row[0].trim().is_empty() {
            continue;
        }
        if row.len() != 5 {
            return Err(parse_err(
                line,
                format!("expected 5 fields, found {}", row.len()),
            ));
        }
        let gene_id = row[0].trim().to_string();
        if gene_id.is_empty() {
            return Err(parse_err(line, "empty gene_id"));
        }
        let length_sp1 = parse_int(&row[1], "length_sp1", line)?;
        let count_sp1 = parse_int(&row[2], "count_sp1", line)?;
        let length_sp2 = parse_int(&row[3], "length_sp2", line)?;
        let count_sp2 = parse_int(&row[4], "count_sp2", line)?;
        if length_sp1 == 0 || length_sp2 == 0 {
            return Err(parse_err(
                line,
                format!("gene `{gene_id}` has a non-positive length"),
            ));
        }
        if let Some(first) = seen.insert(gene_id.clone(), line) {
            return Err(parse_err(
                line,
                format!("duplicate gene id `{gene_id}` (first seen on line {first})"),
            ));
        }
        records.push(GeneRecord::new(
            gene_id, length_sp1, count_sp1, length_sp2, count_sp2,
        ));
    }
    if !header_seen {
        return Err(parse_err(1, "empty count table"));
    }
    if records.is_empty() {
        return Err(parse_err(2, "count table has a header but no genes"));
    }
    OrthologTable::validate(records)
}

pub fn load_counts_tsv(path: impl AsRef<Path>) -> Result<OrthologTable> {
    parse_counts_tsv(open(path.as_ref())?)
}

pub fn write_counts_tsv<W: Write>(table: &OrthologTable, mut out: W) -> Result<()> {
    writeln!(out, "{}", COUNTS_HEADER.join("\t"))?;
    for r in table.records() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.gene_id, r.length_sp1, r.count_sp1, r.length_sp2, r.count_sp2
        )?;
    }
    Ok(())
}

/// Ids of a plain gene list, in file order, without duplicates.
pub fn parse_gene_list<R: Read>(reader: R) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    let mut seen = HashSet::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        let id = line.trim();
        if id.is_empty() || id.starts_with('#') {
            continue;
        }
        if seen.insert(id.to_string()) {
            ids.push(id.to_string());
        }
    }
    Ok(ids)
}

pub fn load_gene_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    parse_gene_list(open(path.as_ref())?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedLoad {
    pub set: ConservedSet,
    /// Listed ids missing from the table.
    pub unknown: Vec<String>,
}

/// Conserved set restricted to ids present in the table; unknown ids are
/// reported rather than rejected.
pub fn conserved_from_ids(ids: Vec<String>, table: &OrthologTable) -> Result<ConservedLoad> {
    let (known, unknown): (Vec<String>, Vec<String>) =
        ids.into_iter().partition(|id| table.contains(id));
    if known.is_empty() {
        return Err(Error::EmptyConservedSet);
    }
    Ok(ConservedLoad {
        set: ConservedSet::new(known, table)?,
        unknown,
    })
}

pub fn load_conserved_list(path: impl AsRef<Path>, table: &OrthologTable) -> Result<ConservedLoad> {
    conserved_from_ids(load_gene_list(path)?, table)
}

pub fn write_gene_list<W: Write>(ids: &[String], mut out: W) -> Result<()> {
    for id in ids {
        writeln!(out, "{id}")?;
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(format_exact).unwrap_or_else(|| "NA".to_string())
}

pub fn write_results_tsv<W: Write>(results: &[TestResult], mut out: W) -> Result<()> {
    writeln!(out, "{}", RESULTS_HEADER.join("\t"))?;
    for r in results {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.gene_id,
            fmt_opt(r.p_value),
            fmt_opt(r.q_value),
            r.direction,
            r.de_call
        )?;
    }
    Ok(())
}

fn parse_opt(field: &str, name: &str, line: u64) -> Result<Option<f64>> {
    if field == "NA" {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| parse_err(line, format!("invalid {name} `{field}`")))
}

pub fn parse_results_tsv<R: Read>(reader: R) -> Result<Vec<TestResult>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i as u64 + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if i == 0 {
            if fields != RESULTS_HEADER {
                return Err(parse_err(
                    1,
                    format!("expected header `{}`", RESULTS_HEADER.join("\t")),
                ));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(parse_err(
                lineno,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let direction = super::call::Direction::parse(fields[3])
            .ok_or_else(|| parse_err(lineno, format!("invalid direction `{}`", fields[3])))?;
        let de_call = fields[4]
            .parse::<bool>()
            .map_err(|_| parse_err(lineno, format!("invalid de_call `{}`", fields[4])))?;
        out.push(TestResult {
            gene_id: fields[0].to_string(),
            p_value: parse_opt(fields[1], "p_value", lineno)?,
            q_value: parse_opt(fields[2], "q_value", lineno)?,
            direction,
            de_call,
        });
    }
    if out.is_empty() {
        return Err(parse_err(1, "results file has no genes"));
    }
    Ok(out)
}

pub fn load_results_tsv(path: impl AsRef<Path>) -> Result<Vec<TestResult>> {
    parse_results_tsv(open(path.as_ref())?)
}

pub fn write_truth_tsv<W: Write>(ids: &[&str], labels: &[TruthLabel], mut out: W) -> Result<()> {
    writeln!(out, "gene_id\tlabel")?;
    for (id, label) in ids.iter().zip(labels) {
        writeln!(out, "{id}\t{}", label.as_str())?;
    }
    Ok(())
}

pub fn parse_truth_tsv<R: Read>(reader: R) -> Result<Vec<(String, TruthLabel)>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i as u64 + 1;
        if i == 0 {
            if line.trim_end() != "gene_id\tlabel" {
                return Err(parse_err(1, "expected header `gene_id\tlabel`"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (id, label) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(lineno, "expected 2 fields"))?;
        let label = TruthLabel::parse(label.trim())
            .ok_or_else(|| parse_err(lineno, format!("invalid label `{label}`")))?;
        out.push((id.to_string(), label));
    }
    Ok(out)
}

pub fn load_truth_tsv(path: impl AsRef<Path>) -> Result<Vec<(String, TruthLabel)>> {
    parse_truth_tsv(open(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "gene_id\tlength_sp1\tcount_sp1\tlength_sp2\tcount_sp2\n\
                        g1\t1000\t5\t900\t2\n\
                        g2\t1200\t0\t1100\t1\n\
                        g3\t800\t7\t850\t7\n";

    #[test]
    fn parses_well_formed_table() {
        let t = parse_counts_tsv(GOOD.as_bytes()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.total_sp1(), 12);
        assert_eq!(t.total_sp2(), 10);
        assert_eq!(t.get("g2").unwrap().length_sp2, 1100);
    }

    #[test]
    fn table_round_trip() {
        let t = parse_counts_tsv(GOOD.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_counts_tsv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), GOOD);
    }

    #[test]
    fn fractional_count_names_line() {
        let bad = GOOD.replace("g2\t1200\t0", "g2\t1200\t3.5");
        let err = parse_counts_tsv(bad.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        assert!(err.to_string().contains("3.5"));
    }

    #[test]
    fn other_violations_name_lines() {
        let err = parse_counts_tsv(GOOD.replace("g3\t800", "g3\t0").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
        let err = parse_counts_tsv(GOOD.replace("g3", "g1").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
        assert!(err.to_string().contains("duplicate"));
        let err = parse_counts_tsv(GOOD.replace("\t7\n", "\t-7\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
        let err = parse_counts_tsv(
            GOOD.replace("g1\t1000\t5\t900\t2", "g1\t1000\t5")
                .as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn bad_header_and_empty_file() {
        let err = parse_counts_tsv(GOOD.replace("count_sp1", "counts").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(parse_counts_tsv("".as_bytes()).is_err());
        assert!(parse_counts_tsv(
            "gene_id\tlength_sp1\tcount_sp1\tlength_sp2\tcount_sp2\n".as_bytes()
        )
        .is_err());
    }

    #[test]
    fn conserved_list_intersection() {
        let t = parse_counts_tsv(GOOD.as_bytes()).unwrap();
        let ids = parse_gene_list("# header\ng1\n\ng3\nmissing\ng1\n".as_bytes()).unwrap();
        assert_eq!(ids, vec!["g1", "g3", "missing"]);
        let loaded = conserved_from_ids(ids, &t).unwrap();
        assert_eq!(loaded.set.len(), 2);
        assert_eq!(loaded.unknown, vec!["missing"]);
        let err = conserved_from_ids(vec!["x".into(), "y".into()], &t).unwrap_err();
        assert_eq!(err, Error::EmptyConservedSet);
    }

    #[test]
    fn results_round_trip() {
        use super::super::call::Direction;
        let results = vec![
            TestResult {
                gene_id: "a".into(),
                p_value: Some(1.7763568394002505e-15),
                q_value: Some(3.552713678800501e-15),
                direction: Direction::HigherSp1,
                de_call: true,
            },
            TestResult {
                gene_id: "b".into(),
                p_value: None,
                q_value: None,
                direction: Direction::None,
                de_call: false,
            },
        ];
        let mut buf = Vec::new();
        write_results_tsv(&results, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("b\tNA\tNA\tnone\tfalse\n"));
        assert_eq!(parse_results_tsv(buf.as_slice()).unwrap(), results);
    }

    #[test]
    fn truth_round_trip() {
        let mut buf = Vec::new();
        write_truth_tsv(
            &["a", "b"],
            &[TruthLabel::Null, TruthLabel::UniqueSp2],
            &mut buf,
        )
        .unwrap();
        let parsed = parse_truth_tsv(buf.as_slice()).unwrap();
        assert_eq!(
            parsed,
            vec![
                ("a".into(), TruthLabel::Null),
                ("b".into(), TruthLabel::UniqueSp2)
            ]
        );
    }
}
