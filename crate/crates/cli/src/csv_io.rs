//! OHLC CSV ingestion and serialization.
//!
//! The expected shape is a comma-delimited file with a header row naming at
//! least `Date`, `Open`, `High`, `Low`, `Close` (any casing, extra columns
//! ignored), dates in `YYYY-MM-DD`. Real exports contain `null` rows and
//! other damage, so malformed data rows are dropped and tallied rather than
//! aborting the load; rows are sorted by date and duplicate dates keep the
//! first occurrence.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use normbench_core::date::Date;
use normbench_core::series::{OhlcRecord, TimeSeriesTable};

/// A parsed table plus the number of data rows that had to be dropped.
#[derive(Debug, Clone)]
pub struct CsvParseResult {
    pub table: TimeSeriesTable,
    pub dropped_rows: usize,
}

#[derive(Debug)]
pub enum CsvError {
    /// The header row is missing one of the required columns.
    MissingColumn(&'static str),
    /// The file has a header but no row survived parsing.
    NoValidRows { dropped: usize },
    /// The file could not be read at all.
    Io { path: String, source: io::Error },
}

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsvError::MissingColumn(name) => {
                write!(f, "CSV header is missing the required column '{name}'")
            }
            CsvError::NoValidRows { dropped } => {
                write!(f, "CSV contains no parsable data rows ({dropped} dropped)")
            }
            CsvError::Io { path, source } => write!(f, "cannot read {path}: {source}"),
        }
    }
}

impl std::error::Error for CsvError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CsvError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

const REQUIRED: [&str; 5] = ["date", "open", "high", "low", "close"];

/// Parses OHLC CSV text into a named table.
pub fn parse_ohlc_csv(text: &str, name: &str) -> Result<CsvParseResult, CsvError> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    let header = lines.next().unwrap_or("");
    let columns: Vec<String> =
        header.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
    let mut indices = [0usize; 5];
    for (slot, required) in indices.iter_mut().zip(REQUIRED) {
        match columns.iter().position(|c| c.as_str() == required) {
            Some(idx) => *slot = idx,
            None => return Err(CsvError::MissingColumn(required)),
        }
    }
    let width = indices.iter().max().expect("non-empty") + 1;

    let mut records = Vec::new();
    let mut dropped = 0usize;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match parse_row(&fields, &indices, width) {
            Some(record) => records.push(record),
            None => dropped += 1,
        }
    }

    records.sort_by_key(|r| r.date);
    // keep the first row of any duplicated date; count the rest as dropped
    let before = records.len();
    records.dedup_by_key(|r| r.date);
    dropped += before - records.len();

    match TimeSeriesTable::new(name, records) {
        Ok(table) => Ok(CsvParseResult { table, dropped_rows: dropped }),
        Err(_) => Err(CsvError::NoValidRows { dropped }),
    }
}

fn parse_row(fields: &[&str], indices: &[usize; 5], width: usize) -> Option<OhlcRecord> {
    if fields.len() < width {
        return None;
    }
    let date = Date::parse_iso(fields[indices[0]]).ok()?;
    let mut prices = [0.0f64; 4];
    for (price, &idx) in prices.iter_mut().zip(&indices[1..]) {
        *price = fields[idx].parse().ok()?;
    }
    let [open, high, low, close] = prices;
    OhlcRecord::new(date, open, high, low, close).ok()
}

/// Reads and parses an OHLC CSV file; the table is named after the file stem.
pub fn read_ohlc_csv(path: &Path) -> Result<CsvParseResult, CsvError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CsvError::Io { path: path.display().to_string(), source })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    parse_ohlc_csv(&text, name)
}

/// Serializes a table back to the same CSV shape. Floats print in shortest
/// round-trip form, so parsing the output reproduces the table exactly.
pub fn to_csv_string(table: &TimeSeriesTable) -> String {
    let mut out = String::from("Date,Open,High,Low,Close\n");
    for r in table.records() {
        out.push_str(&format!("{},{},{},{},{}\n", r.date, r.open, r.high, r.low, r.close));
    }
    out
}
