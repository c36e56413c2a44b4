//! Time-series CSV and binary snapshot formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::diagnostics::{CheckpointRecord, TimeSeries};
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, RealField};

/// Header line (without newline) for the given record columns.
pub fn csv_header(columns: &[String]) -> String {
    let mut h = String::from("t");
    for c in columns {
        h.push(',');
        h.push_str(c);
    }
    h
}

/// One data row; every number uses `{:.16e}`, i.e. 17 significant digits.
pub fn csv_row(record: &CheckpointRecord) -> String {
    let mut row = format!("{:.16e}", record.t);
    for (_, v) in &record.entries {
        row.push(',');
        row.push_str(&format!("{v:.16e}"));
    }
    row
}

/// Complete CSV text for a series with the given columns.
pub fn csv_text(columns: &[String], series: &TimeSeries) -> String {
    let mut out = csv_header(columns);
    out.push('\n');
    for r in series.records() {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, columns: &[String], series: &TimeSeries) -> Result<()> {
    fs::write(path, csv_text(columns, series))?;
    Ok(())
}

/// Parses a CSV written by [`csv_text`]: header names and numeric rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("row {}: `{v}` is not a number", i + 1))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != header.len() {
            return Err(Error::InvalidInput(format!(
                "row {} has {} fields",
                i + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

const SNAPSHOT_MAGIC: &str = "CFNS1";

/// Serializes one field: ASCII header then little-endian `f64` values, row-major.
pub fn snapshot_bytes(name: &str, field: &RealField, t: f64) -> Result<Vec<u8>> {
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(Error::Snapshot(format!(
            "field name `{name}` must be a single word"
        )));
    }
    let g = field.grid();
    let header = format!(
        "{SNAPSHOT_MAGIC} {name} {} {:e} {:e}\n",
        g.n_points(),
        g.box_length(),
        t
    );
    let mut out = Vec::with_capacity(header.len() + 8 * g.len());
    out.extend_from_slice(header.as_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// A decoded snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub name: String,
    pub t: f64,
    pub field: RealField,
}

pub fn parse_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    let bad = |m: &str| Error::Snapshot(m.to_string());
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing header line"))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| bad("header is not ASCII"))?;
    let parts: Vec<&str> = header.split(' ').collect();
    let [magic, name, n, l, t] = parts.as_slice() else {
        return Err(bad("header must have five fields"));
    };
    if *magic != SNAPSHOT_MAGIC {
        return Err(bad("wrong magic"));
    }
    let n: usize = n.parse().map_err(|_| bad("bad n_points"))?;
    let l: f64 = l.parse().map_err(|_| bad("bad box_length"))?;
    let t: f64 = t.parse().map_err(|_| bad("bad time"))?;
    let grid = GridSpec::square(n, l).map_err(|e| Error::Snapshot(e.to_string()))?;
    let body = &bytes[nl + 1..];
    if body.len() != 8 * grid.len() {
        return Err(bad("payload length does not match n_points²"));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let field = RealField::from_values(grid, values).map_err(|e| Error::Snapshot(e.to_string()))?;
    Ok(Snapshot {
        name: name.to_string(),
        t,
        field,
    })
}

pub fn write_snapshot(path: &Path, name: &str, field: &RealField, t: f64) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&snapshot_bytes(name, field, t)?)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    parse_snapshot(&fs::read(path)?)
}
