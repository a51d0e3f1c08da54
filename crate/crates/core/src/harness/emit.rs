//! CSV and JSON output, and the comparison tables built from run CSVs.
//!
//! Run CSV header:
//! `run,seed,function,D,algorithm,checkpoint_1..checkpoint_K,final_fev,nfes,wall_ms`.
//! Floats use Rust's shortest round-trip formatting, so values re-parse exactly.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::de::RunRecord;
use crate::error::{Error, Result};
use crate::rng::RNG_VERSION;
use crate::stats::{friedman, friedman_post_hoc, hochberg_adjust, mean_std, wilcoxon_rank_sum, FriedmanResult};

use super::config::ExperimentConfig;
use super::farm::SummaryRow;

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io.to_string()),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// One row of a run CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub run: usize,
    pub seed: u64,
    pub function: String,
    pub dimension: usize,
    pub algorithm: String,
    pub checkpoint_fev: Vec<f64>,
    pub final_fev: f64,
    pub nfes: u64,
    pub wall_ms: f64,
}

impl From<&RunRecord> for CsvRecord {
    fn from(r: &RunRecord) -> Self {
        Self {
            run: r.run,
            seed: r.seed,
            function: r.function.clone(),
            dimension: r.dimension,
            algorithm: r.algorithm.clone(),
            checkpoint_fev: r.checkpoint_fev.clone(),
            final_fev: r.final_fev,
            nfes: r.nfes,
            wall_ms: r.wall_ms,
        }
    }
}

pub fn write_runs_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::parameter("records", "nothing to write"));
    }
    let k = records[0].checkpoint_fev.len();
    if let Some(r) = records.iter().find(|r| r.checkpoint_fev.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: r.checkpoint_fev.len(),
        });
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["run", "seed", "function", "D", "algorithm"].map(String::from).to_vec();
    header.extend((1..=k).map(|i| format!("checkpoint_{i}")));
    header.extend(["final_fev", "nfes", "wall_ms"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row = vec![
            r.run.to_string(),
            r.seed.to_string(),
            r.function.clone(),
            r.dimension.to_string(),
            r.algorithm.clone(),
        ];
        row.extend(r.checkpoint_fev.iter().map(f64::to_string));
        row.extend([r.final_fev.to_string(), r.nfes.to_string(), r.wall_ms.to_string()]);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| Error::Parse(format!("missing column `{name}`")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("column `{name}`: cannot parse `{raw}`")))
}

pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<CsvRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    let fixed = ["run", "seed", "function", "D", "algorithm"];
    for (i, name) in fixed.iter().enumerate() {
        if header.get(i) != Some(*name) {
            return Err(Error::Parse(format!("expected column `{name}` at position {i}")));
        }
    }
    let n = header.len();
    if n < 8 || header.get(n - 3) != Some("final_fev") || header.get(n - 2) != Some("nfes") || header.get(n - 1) != Some("wall_ms") {
        return Err(Error::Parse("header must end with final_fev,nfes,wall_ms".into()));
    }
    let k = n - 8;
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        out.push(CsvRecord {
            run: field(&row, 0, "run")?,
            seed: field(&row, 1, "seed")?,
            function: field(&row, 2, "function")?,
            dimension: field(&row, 3, "D")?,
            algorithm: field(&row, 4, "algorithm")?,
            checkpoint_fev: (0..k)
                .map(|i| field(&row, 5 + i, "checkpoint"))
                .collect::<Result<_>>()?,
            final_fev: field(&row, n - 3, "final_fev")?,
            nfes: field(&row, n - 2, "nfes")?,
            wall_ms: field(&row, n - 1, "wall_ms")?,
        });
    }
    Ok(out)
}

/// JSON document: records plus the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDocument {
    pub rng_version: String,
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
}

impl ExperimentDocument {
    pub fn new(config: &ExperimentConfig, records: &[RunRecord]) -> Self {
        Self {
            rng_version: RNG_VERSION.to_string(),
            config: config.clone(),
            records: records.to_vec(),
        }
    }
}

pub fn write_json<W: Write>(doc: &ExperimentDocument, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, doc).map_err(|e| Error::Io(e.to_string()))
}

pub fn read_json<R: Read>(input: R) -> Result<ExperimentDocument> {
    serde_json::from_reader(input).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["function", "D", "algorithm", "runs", "mean", "std", "mean_std"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.function.clone(),
            r.dimension.to_string(),
            r.algorithm.clone(),
            r.runs.to_string(),
            r.mean.to_string(),
            r.std.to_string(),
            r.cell.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        out.push(SummaryRow {
            function: field(&row, 0, "function")?,
            dimension: field(&row, 1, "D")?,
            algorithm: field(&row, 2, "algorithm")?,
            runs: field(&row, 3, "runs")?,
            mean: field(&row, 4, "mean")?,
            std: field(&row, 5, "std")?,
            cell: field(&row, 6, "mean_std")?,
        });
    }
    Ok(out)
}

/// Writes `<stem>.csv`, `<stem>.json` and `<stem>_summary.csv` into `dir`.
pub fn write_all(
    dir: &Path,
    stem: &str,
    config: &ExperimentConfig,
    records: &[RunRecord],
    summary: &[SummaryRow],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_runs_csv(records, fs::File::create(dir.join(format!("{stem}.csv")))?)?;
    write_json(
        &ExperimentDocument::new(config, records),
        fs::File::create(dir.join(format!("{stem}.json")))?,
    )?;
    write_summary_csv(summary, fs::File::create(dir.join(format!("{stem}_summary.csv")))?)?;
    Ok(())
}

/// One line of the per-function comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    /// Function name with dimension, e.g. `sphere@30`.
    pub function: String,
    pub algorithm: String,
    pub mean: f64,
    pub std: f64,
    /// Empty for the reference algorithm.
    pub symbol: String,
    pub p_raw: Option<f64>,
    pub p_hochberg: Option<f64>,
}

/// Average-rank table with post-hoc statistics against the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanTable {
    pub algorithms: Vec<String>,
    pub result: FriedmanResult,
    /// Per algorithm: `(z, p_unadjusted, p_hochberg)`; `None` for the reference.
    pub post_hoc: Vec<Option<(f64, f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reference: String,
    pub rows: Vec<ComparisonRow>,
    /// Present when at least two functions are compared.
    pub friedman: Option<FriedmanTable>,
}

/// Wilcoxon verdicts of every algorithm against `reference` per function
/// (Hochberg-adjusted within the function), and a Friedman ranking of mean
/// final FEVs across functions.
pub fn compare(records: &[CsvRecord], reference: &str, alpha: f64) -> Result<Comparison> {
    let mut by_fn: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for r in records {
        by_fn
            .entry(format!("{}@{}", r.function, r.dimension))
            .or_default()
            .entry(r.algorithm.clone())
            .or_default()
            .push(r.final_fev);
    }
    if by_fn.is_empty() {
        return Err(Error::parameter("records", "nothing to compare"));
    }
    let algorithms: Vec<String> = by_fn.values().next().unwrap().keys().cloned().collect();
    if !algorithms.iter().any(|a| a == reference) {
        return Err(Error::config("reference", format!("algorithm `{reference}` not in the data")));
    }
    let mut rows = Vec::new();
    let mut means = Vec::new();
    for (function, algs) in &by_fn {
        let names: Vec<&String> = algs.keys().collect();
        if names.len() != algorithms.len() || names.iter().zip(&algorithms).any(|(a, b)| *a != b) {
            return Err(Error::parameter("records", format!("function `{function}` lacks some algorithms")));
        }
        let ref_sample = &algs[reference];
        let mut verdicts = Vec::new();
        for (a, sample) in algs {
            if a != reference {
                verdicts.push(wilcoxon_rank_sum(sample, ref_sample, alpha)?);
            }
        }
        let adjusted = hochberg_adjust(&verdicts.iter().map(|v| v.p_value).collect::<Vec<_>>())?;
        let mut vi = 0;
        let mut row_means = Vec::new();
        for (a, sample) in algs {
            let (mean, std) = mean_std(sample)?;
            row_means.push(mean);
            let (symbol, p_raw, p_hochberg) = if a == reference {
                (String::new(), None, None)
            } else {
                let v = verdicts[vi];
                let adj = adjusted[vi];
                vi += 1;
                (v.symbol.to_string(), Some(v.p_value), Some(adj))
            };
            rows.push(ComparisonRow {
                function: function.clone(),
                algorithm: a.clone(),
                mean,
                std,
                symbol,
                p_raw,
                p_hochberg,
            });
        }
        means.push(row_means);
    }
    let friedman = if means.len() >= 2 && algorithms.len() >= 2 {
        let result = friedman(&means)?;
        let control = algorithms.iter().position(|a| a == reference).unwrap();
        let hoc = friedman_post_hoc(&result, control)?;
        let mut post_hoc = vec![None; algorithms.len()];
        for h in hoc {
            post_hoc[h.index] = Some((h.z, h.p_unadjusted, h.p_hochberg));
        }
        Some(FriedmanTable {
            algorithms: algorithms.clone(),
            result,
            post_hoc,
        })
    } else {
        None
    };
    Ok(Comparison {
        reference: reference.to_string(),
        rows,
        friedman,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn write_comparison_csv<W: Write>(cmp: &Comparison, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["function", "algorithm", "mean", "std", "symbol", "p_raw", "p_hochberg"])
        .map_err(csv_err)?;
    for r in &cmp.rows {
        w.write_record([
            r.function.clone(),
            r.algorithm.clone(),
            r.mean.to_string(),
            r.std.to_string(),
            r.symbol.clone(),
            opt(r.p_raw),
            opt(r.p_hochberg),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_friedman_csv<W: Write>(table: &FriedmanTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "average_rank", "z", "p_unadjusted", "p_hochberg"])
        .map_err(csv_err)?;
    for (i, a) in table.algorithms.iter().enumerate() {
        let (z, p, h) = match table.post_hoc[i] {
            Some((z, p, h)) => (Some(z), Some(p), Some(h)),
            None => (None, None, None),
        };
        w.write_record([a.clone(), table.result.average_ranks[i].to_string(), opt(z), opt(p), opt(h)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::de::PhaseCounts;

    fn rec(run: usize, algorithm: &str, function: &str, fev: f64) -> RunRecord {
        RunRecord {
            run,
            seed: run as u64,
            function: function.into(),
            dimension: 2,
            algorithm: algorithm.into(),
            checkpoints: vec![1, 2],
            checkpoint_fev: vec![fev * 2.0, fev],
            final_fev: fev,
            nfes: 2,
            wall_ms: 0.25,
            phases: PhaseCounts::default(),
        }
    }

    #[test]
    fn single_record_csv() {
        let mut buf = Vec::new();
        write_runs_csv(&[rec(0, "de", "sphere", 0.1 + 0.2)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "run,seed,function,D,algorithm,checkpoint_1,checkpoint_2,final_fev,nfes,wall_ms");
        assert_eq!(lines[1], "0,0,sphere,2,de,0.6000000000000001,0.30000000000000004,0.30000000000000004,2,0.25");
        let back = read_runs_csv(text.as_bytes()).unwrap();
        assert_eq!(back[0], CsvRecord::from(&rec(0, "de", "sphere", 0.1 + 0.2)));
    }

    #[test]
    fn empty_records_rejected() {
        assert!(write_runs_csv(&[], Vec::new()).is_err());
    }

    #[test]
    fn comparison_marks_reference_and_symbols() {
        let mut rs = Vec::new();
        for run in 0..8 {
            rs.push(rec(run, "ibetacobl", "f1", run as f64));
            rs.push(rec(run, "de", "f1", 100.0 + run as f64));
            rs.push(rec(run, "ibetacobl", "f2", run as f64));
            rs.push(rec(run, "de", "f2", run as f64 + 0.5));
        }
        let rows: Vec<CsvRecord> = rs.iter().map(CsvRecord::from).collect();
        let c = compare(&rows, "ibetacobl", 0.05).unwrap();
        let de_f1 = c.rows.iter().find(|r| r.function == "f1@2" && r.algorithm == "de").unwrap();
        assert_eq!(de_f1.symbol, "-");
        let de_f2 = c.rows.iter().find(|r| r.function == "f2@2" && r.algorithm == "de").unwrap();
        assert_eq!(de_f2.symbol, "=");
        let refr = c.rows.iter().find(|r| r.algorithm == "ibetacobl").unwrap();
        assert!(refr.p_raw.is_none());
        let f = c.friedman.unwrap();
        assert_eq!(f.result.average_ranks, vec![2.0, 1.0]);
        assert!(compare(&rows, "gobl", 0.05).is_err());
    }
}
