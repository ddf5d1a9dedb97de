use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::Algorithm;
use crate::harness::sweep::{SweepCell, SweepTable};
use crate::signal::NoiseKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    /// Aligned comparison tables, one per filter order, 4 decimals.
    Text,
    /// One row per run.
    Csv,
    /// One `key=value` line per run.
    Records,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(TableFormat::Text),
            "csv" => Ok(TableFormat::Csv),
            "records" => Ok(TableFormat::Records),
            other => Err(Error::config(format!(
                "unknown format `{other}` (expected text, csv or records)"
            ))),
        }
    }
}

/// One CSV row. Metric fields are empty for a diverged run and
/// `correlation` is empty when degenerate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub algorithm: String,
    pub noise_kind: String,
    pub order: usize,
    pub step_size: f64,
    pub seed: u64,
    pub snr_db: Option<f64>,
    pub correlation: Option<f64>,
    pub mse: Option<f64>,
    pub diverged_at: Option<usize>,
}

fn records(table: &SweepTable) -> impl Iterator<Item = CsvRecord> + '_ {
    table.cells.iter().flat_map(|cell| {
        cell.reports.iter().map(move |r| CsvRecord {
            algorithm: cell.algorithm.to_string(),
            noise_kind: cell.noise_kind.to_string(),
            order: cell.order,
            step_size: cell.step_size,
            seed: r.seed,
            snr_db: r.metrics.map(|m| m.snr_db),
            correlation: r.metrics.and_then(|m| m.correlation),
            mse: r.metrics.map(|m| m.mse),
            diverged_at: r.diverged_at,
        })
    })
}

pub fn emit_table(table: &SweepTable, format: TableFormat) -> String {
    match format {
        TableFormat::Text => render_text(table),
        TableFormat::Csv => render_csv(table),
        TableFormat::Records => render_records(table),
    }
}

fn render_csv(table: &SweepTable) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    // header first, so an empty table still names its columns
    writer
        .write_record([
            "algorithm",
            "noise_kind",
            "order",
            "step_size",
            "seed",
            "snr_db",
            "correlation",
            "mse",
            "diverged_at",
        ])
        .expect("in-memory write");
    let mut writer = {
        let bytes = writer.into_inner().expect("in-memory flush");
        csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(bytes)
    };
    for rec in records(table) {
        writer.serialize(rec).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Parses the CSV produced by [`emit_table`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| r.map_err(|e| Error::config(format!("bad sweep CSV: {e}"))))
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_records(table: &SweepTable) -> String {
    let mut out = String::new();
    for r in records(table) {
        let _ = writeln!(
            out,
            "algorithm={} noise_kind={} order={} step_size={} seed={} snr_db={} correlation={} mse={} diverged_at={}",
            r.algorithm,
            r.noise_kind,
            r.order,
            r.step_size,
            r.seed,
            opt(r.snr_db),
            opt(r.correlation),
            opt(r.mse),
            r.diverged_at.map(|d| d.to_string()).unwrap_or_default(),
        );
    }
    out
}

const LABEL_W: usize = 11;
const METRIC_W: usize = 25;
const COL_W: usize = 10;

fn fmt4(v: Option<f64>, diverged: bool) -> String {
    match v {
        _ if diverged => "DIVERGED".to_string(),
        Some(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.to_string(),
        Some(x) => format!("{x:.4}"),
        None => "-".to_string(),
    }
}

fn column_order(table: &SweepTable) -> (Vec<NoiseKind>, Vec<Algorithm>) {
    let mut kinds = table.grid.noise_kinds.clone();
    kinds.sort();
    kinds.dedup();
    let mut algs = table.grid.algorithms.clone();
    algs.sort();
    algs.dedup();
    (kinds, algs)
}

fn header(out: &mut String, kinds: &[NoiseKind], algs: &[Algorithm]) {
    let group_w = COL_W * algs.len();
    let mut line = format!("{:<w$}", "PARAMETERS", w = LABEL_W + METRIC_W);
    for kind in kinds {
        let name = match kind {
            NoiseKind::WhiteGaussian => "WHITE NOISE",
            NoiseKind::UniformRandom => "RANDOM NOISE",
        };
        let _ = write!(line, "{name:<group_w$}");
    }
    let _ = writeln!(out, "{}", line.trim_end());
    let mut line = format!("{:<LABEL_W$}{:<METRIC_W$}", "STEP SIZE", "METRICS");
    for _ in kinds {
        for alg in algs {
            let _ = write!(line, "{:>COL_W$}", alg.as_str().to_uppercase());
        }
    }
    let _ = writeln!(out, "{}", line.trim_end());
}

/// Tables grouped by filter order, rows by step size with SNR /
/// correlation / MSE sub-rows, columns by noise kind then algorithm.
fn render_text(table: &SweepTable) -> String {
    let (kinds, algs) = column_order(table);
    let mut out = String::new();
    if table.cells.is_empty() {
        header(&mut out, &kinds, &algs);
        return out;
    }
    let mut orders: Vec<usize> = table.cells.iter().map(|c| c.order).collect();
    orders.dedup();
    for (i, order) in orders.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "Filter length N={order}");
        header(&mut out, &kinds, &algs);
        let mut steps: Vec<f64> = table
            .cells
            .iter()
            .filter(|c| c.order == *order)
            .map(|c| c.step_size)
            .collect();
        steps.dedup();
        for step in steps {
            let lookup = |kind: NoiseKind, alg: Algorithm| -> Option<&SweepCell> {
                table.cell(alg, kind, *order, step)
            };
            type Pick = fn(&crate::harness::CellSummary) -> Option<f64>;
            let rows: [(&str, Pick); 3] = [
                ("SNR (dB)", |s| s.snr_db),
                ("Correlation coefficient", |s| s.correlation),
                ("MSE", |s| s.mse),
            ];
            for (r, (label, pick)) in rows.iter().enumerate() {
                let step_label = if r == 0 {
                    format!("{step:.2}")
                } else {
                    String::new()
                };
                let mut line = format!("{step_label:<LABEL_W$}{label:<METRIC_W$}");
                for &kind in &kinds {
                    for &alg in &algs {
                        let text = match lookup(kind, alg) {
                            Some(cell) => {
                                let s = cell.summary();
                                fmt4(pick(&s), s.diverged == s.runs && s.runs > 0)
                            }
                            None => "-".to_string(),
                        };
                        let _ = write!(line, "{text:>COL_W$}");
                    }
                }
                let _ = writeln!(out, "{}", line.trim_end());
            }
        }
    }
    out
}
