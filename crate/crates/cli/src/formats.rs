//! On-disk schemas of the walk, profile and sweep outputs, as CSV or NDJSON.
//!
//! Both encodings carry the same fields in the same order. Floats are written
//! in shortest round-trip form, so reading a file and writing it back yields
//! the same bytes.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use kerrwalk::{AveragingWindow, Regime, SweepCell, SweepTable, TimeSeriesRecord};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};

/// A row type with a fixed column layout.
pub trait Schema: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

/// One line of a walk time series: `t,ipr,sp,norm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkRow {
    pub t: u64,
    pub ipr: f64,
    pub sp: f64,
    pub norm: f64,
}

impl Schema for WalkRow {
    const HEADER: &'static [&'static str] = &["t", "ipr", "sp", "norm"];
}

impl From<TimeSeriesRecord> for WalkRow {
    fn from(r: TimeSeriesRecord) -> Self {
        Self {
            t: r.t,
            ipr: r.ipr,
            sp: r.sp,
            norm: r.norm,
        }
    }
}

impl From<WalkRow> for TimeSeriesRecord {
    fn from(r: WalkRow) -> Self {
        Self {
            t: r.t,
            ipr: r.ipr,
            sp: r.sp,
            norm: r.norm,
        }
    }
}

/// Site probability at a snapshot: `t,n,p`, with `n` the offset from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRow {
    pub t: u64,
    pub n: i64,
    pub p: f64,
}

impl Schema for ProfileRow {
    const HEADER: &'static [&'static str] = &["t", "n", "p"];
}

/// One diagram cell: `theta,chi,ipr_bar,ipr_norm,sp_bar,regime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub theta: f64,
    pub chi: f64,
    pub ipr_bar: f64,
    pub ipr_norm: f64,
    pub sp_bar: f64,
    pub regime: Regime,
}

impl Schema for SweepRow {
    const HEADER: &'static [&'static str] = &["theta", "chi", "ipr_bar", "ipr_norm", "sp_bar", "regime"];
}

impl From<&SweepCell> for SweepRow {
    fn from(c: &SweepCell) -> Self {
        Self {
            theta: c.theta,
            chi: c.chi,
            ipr_bar: c.ipr_bar,
            ipr_norm: c.ipr_norm,
            sp_bar: c.sp_bar,
            regime: c.regime,
        }
    }
}

/// Sidecar written next to a sweep table. It embeds the full run config,
/// so `kerrwalk sweep --config <sidecar>` regenerates the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub artifact_version: String,
    #[serde(flatten)]
    pub config: RunConfig,
    /// Window resolved against the run length.
    pub resolved_window: AveragingWindow,
    pub theta_points: Vec<f64>,
    pub chi_points: Vec<f64>,
    /// Row-major index of the cell that normalizes `ipr_norm`.
    pub argmax: usize,
}

impl SweepMetadata {
    pub fn new(config: &RunConfig, table: &SweepTable) -> Self {
        let cols = table.spec.chi.count;
        Self {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            resolved_window: table.window,
            theta_points: table.cells.iter().step_by(cols).map(|c| c.theta).collect(),
            chi_points: table.cells[..cols].iter().map(|c| c.chi).collect(),
            argmax: table.argmax,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metadata serializes");
        s.push('\n');
        s
    }
}

/// Streams rows of one schema to a sink.
pub struct RecordWriter<W: Write> {
    inner: Inner<W>,
}

enum Inner<W: Write> {
    Csv(Box<csv::Writer<W>>),
    Ndjson(W),
}

impl<W: Write> RecordWriter<W> {
    /// Creates the writer; a CSV header is written immediately, even for empty tables.
    pub fn new<T: Schema>(sink: W, format: Format) -> std::io::Result<Self> {
        let inner = match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .has_headers(false)
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(sink);
                w.write_record(T::HEADER)?;
                Inner::Csv(Box::new(w))
            }
            Format::Ndjson => Inner::Ndjson(sink),
        };
        Ok(Self { inner })
    }

    pub fn write<T: Schema>(&mut self, row: &T) -> std::io::Result<()> {
        match &mut self.inner {
            Inner::Csv(w) => w.serialize(row).map_err(csv_to_io),
            Inner::Ndjson(w) => {
                serde_json::to_writer(&mut *w, row)?;
                w.write_all(b"\n")
            }
        }
    }

    pub fn finish(self) -> std::io::Result<W> {
        match self.inner {
            Inner::Csv(w) => w.into_inner().map_err(|e| e.into_error()),
            Inner::Ndjson(mut w) => {
                w.flush()?;
                Ok(w)
            }
        }
    }
}

fn csv_to_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

/// Serializes `rows` into an in-memory buffer.
pub fn to_bytes<'a, T: Schema + 'a>(rows: impl IntoIterator<Item = &'a T>, format: Format) -> Vec<u8> {
    let mut w = RecordWriter::new::<T>(Vec::new(), format).expect("in-memory write");
    for row in rows {
        w.write(row).expect("in-memory write");
    }
    w.finish().expect("in-memory write")
}

/// Parses rows, checking the column layout. `origin` labels diagnostics.
pub fn read_rows<T: Schema, R: Read>(source: R, format: Format, origin: &Path) -> Result<Vec<T>> {
    let schema_error = |line: u64, column: u64, message: String| CliError::Schema {
        path: origin.to_path_buf(),
        line,
        column,
        message,
    };
    match format {
        Format::Csv => {
            let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
            let header = reader
                .headers()
                .map_err(|e| schema_error(1, 1, e.to_string()))?
                .clone();
            if let Some(col) = (0..T::HEADER.len().max(header.len())).find(|&i| header.get(i) != T::HEADER.get(i).copied()) {
                return Err(schema_error(
                    1,
                    col as u64 + 1,
                    format!("expected header `{}`, found `{}`", T::HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
                ));
            }
            let mut rows = Vec::new();
            for record in reader.records() {
                let record = record.map_err(|e| {
                    let line = e.position().map_or(0, |p| p.line());
                    schema_error(line, 1, e.to_string())
                })?;
                let line = record.position().map_or(0, |p| p.line());
                let row = record.deserialize(Some(&header)).map_err(|e| {
                    let column = match e.kind() {
                        csv::ErrorKind::Deserialize { err, .. } => err.field().map_or(1, |f| f + 1),
                        _ => 1,
                    };
                    schema_error(line, column, e.to_string())
                })?;
                rows.push(row);
            }
            Ok(rows)
        }
        Format::Ndjson => {
            let mut rows = Vec::new();
            for (i, line) in BufReader::new(source).lines().enumerate() {
                let line = line.map_err(CliError::io(origin))?;
                if line.is_empty() {
                    continue;
                }
                let row = serde_json::from_str(&line)
                    .map_err(|e| schema_error(i as u64 + 1, e.column() as u64, e.to_string()))?;
                rows.push(row);
            }
            Ok(rows)
        }
    }
}

/// Reads a data file, picking the encoding from the extension (`.ndjson`/`.jsonl`, else CSV).
pub fn read_file<T: Schema>(path: &Path) -> Result<Vec<T>> {
    let file = std::fs::File::open(path).map_err(CliError::io(path))?;
    read_rows(file, format_for_path(path), path)
}

pub fn format_for_path(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("ndjson" | "jsonl") => Format::Ndjson,
        _ => Format::Csv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk_rows() -> Vec<WalkRow> {
        vec![
            WalkRow { t: 1, ipr: 2.0, sp: 0.0, norm: 1.0 },
            WalkRow { t: 2, ipr: 2.0000000000000004, sp: 3.5e-5, norm: 0.9999999999999998 },
        ]
    }

    #[test]
    fn csv_layout() {
        let bytes = to_bytes(&walk_rows(), Format::Csv);
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,ipr,sp,norm"));
        assert_eq!(lines.next(), Some("1,2.0,0.0,1.0"));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn empty_csv_still_has_header() {
        let bytes = to_bytes::<SweepRow>(&[], Format::Csv);
        assert_eq!(bytes, b"theta,chi,ipr_bar,ipr_norm,sp_bar,regime\n");
    }

    #[test]
    fn ndjson_layout() {
        let row = SweepRow {
            theta: 0.5,
            chi: 1.0,
            ipr_bar: 3.0,
            ipr_norm: 0.25,
            sp_bar: 0.75,
            regime: Regime::SelfTrapped,
        };
        let text = String::from_utf8(to_bytes(&[row], Format::Ndjson)).unwrap();
        assert_eq!(
            text,
            "{\"theta\":0.5,\"chi\":1.0,\"ipr_bar\":3.0,\"ipr_norm\":0.25,\"sp_bar\":0.75,\"regime\":\"self_trapped\"}\n"
        );
    }

    #[test]
    fn header_mismatch_reports_column() {
        let data = "t,ipr,norm,sp\n1,1.0,1.0,1.0\n";
        let err = read_rows::<WalkRow, _>(data.as_bytes(), Format::Csv, Path::new("x.csv")).unwrap_err();
        match err {
            CliError::Schema { line, column, .. } => assert_eq!((line, column), (1, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_cell_reports_line() {
        let data = "t,n,p\n0,0,1.0\n1,-1,oops\n";
        let err = read_rows::<ProfileRow, _>(data.as_bytes(), Format::Csv, Path::new("p.csv")).unwrap_err();
        match err {
            CliError::Schema { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
        let data = "{\"t\":0,\"n\":0,\"p\":1.0}\n{\"t\":0,\"n\":0}\n";
        let err = read_rows::<ProfileRow, _>(data.as_bytes(), Format::Ndjson, Path::new("p.ndjson")).unwrap_err();
        assert!(matches!(err, CliError::Schema { line: 2, .. }), "{err:?}");
    }
}
