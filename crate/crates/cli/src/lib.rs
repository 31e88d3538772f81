//! Benchmark harness around `normbench-core`: OHLC CSV ingestion, the
//! experiment sweep, report files, and the numerical self-check suites.

pub mod checkpoint;
pub mod checks;
pub mod csv_io;
pub mod experiment;
pub mod report;
