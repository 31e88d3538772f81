//! Report files: a replayable JSON dump, method-by-method markdown tables,
//! and per-cell prediction CSVs for external plotting.
//!
//! Output is deterministic given the report (no timestamps, stable field
//! and row order), so identical runs produce byte-identical files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use normbench_core::metrics::ErrorPair;

use crate::experiment::{ExperimentReport, MethodSummary};

/// Output flavors of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// `report.json`: the full report, config included, for exact replay.
    Json,
    /// `tables.md`: one table per dataset and error space.
    Markdown,
    /// `predictions_<dataset>_<method>_<seed>.csv`: (date, actual,
    /// predicted) rows in price space for every cell that has them.
    Csv,
}

/// Writes one format into `out_dir` and returns the created paths.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    out_dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    match format {
        ReportFormat::Json => {
            let path = out_dir.join("report.json");
            let mut json =
                serde_json::to_string_pretty(report).expect("report serializes");
            json.push('\n');
            fs::write(&path, json)?;
            Ok(vec![path])
        }
        ReportFormat::Markdown => {
            let path = out_dir.join("tables.md");
            fs::write(&path, render_markdown(report))?;
            Ok(vec![path])
        }
        ReportFormat::Csv => {
            let mut paths = Vec::new();
            for cell in &report.cells {
                let Some(result) = cell.result() else { continue };
                let Some(price) = &result.price_space else { continue };
                let name = format!(
                    "predictions_{}_{}_{}.csv",
                    sanitize(&cell.dataset),
                    cell.method.id(),
                    cell.seed
                );
                let path = out_dir.join(name);
                let mut text = String::from("date,actual,predicted\n");
                for ((date, actual), predicted) in
                    result.test_dates.iter().zip(&price.actual).zip(&price.predicted)
                {
                    text.push_str(&format!("{date},{actual},{predicted}\n"));
                }
                fs::write(&path, text)?;
                paths.push(path);
            }
            Ok(paths)
        }
    }
}

/// Reads back a JSON report written by [`emit_report`].
pub fn load_report(path: &Path) -> io::Result<ExperimentReport> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn error_cells(summary: &MethodSummary, pair: Option<&ErrorPair>) -> String {
    match pair {
        Some(e) => format!("{:.4e} | {:.4e}", e.mse, e.mae),
        None if summary.seeds_completed == 0 => "failed | failed".to_string(),
        None => "n/a | n/a".to_string(),
    }
}

/// Markdown tables, one per dataset and error space: rows are methods,
/// columns are MSE and MAE (medians across completed seeds).
pub fn render_markdown(report: &ExperimentReport) -> String {
    let mut out = String::from("# Normalization benchmark results\n");
    let mut datasets: Vec<&str> = Vec::new();
    for s in &report.summaries {
        if !datasets.contains(&s.dataset.as_str()) {
            datasets.push(&s.dataset);
        }
    }
    let seeds = report.config.seeds.len();
    out.push_str(&format!(
        "\nMedians over {seeds} seed(s); window {w}, horizon {h}, hidden {hd:?}, {e} epoch cap.\n",
        w = report.config.window_len,
        h = report.config.horizon,
        hd = report.config.hidden_dims,
        e = report.config.epochs,
    ));
    for dataset in datasets {
        for (space, pick) in [
            ("normalized space", true),
            ("price space", false),
        ] {
            out.push_str(&format!("\n## {dataset} — prediction error ({space})\n\n"));
            out.push_str("| Normalization | MSE | MAE |\n|---|---|---|\n");
            for summary in report.summaries.iter().filter(|s| s.dataset == dataset) {
                let pair = if pick {
                    summary.median_normalized.as_ref()
                } else {
                    summary.median_price.as_ref()
                };
                out.push_str(&format!(
                    "| {} | {} |\n",
                    summary.method.name(),
                    error_cells(summary, pair)
                ));
            }
            if report
                .summaries
                .iter()
                .any(|s| s.dataset == dataset && s.seeds_completed < s.seeds_requested)
            {
                out.push_str("\nSome seeds failed; see report.json for per-cell errors.\n");
            }
        }
    }
    out
}
