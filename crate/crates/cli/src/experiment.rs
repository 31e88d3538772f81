//! The benchmark sweep: for every (dataset, method, seed) cell, fit scalers
//! on the training rows, normalize, window, train the recurrent forecaster
//! with early stopping on validation loss, and score the test segment in
//! both normalized and price space.
//!
//! Cells run sequentially and independently; a failed cell (degenerate
//! scaler, divergence, data too short) is recorded with its error and the
//! sweep continues. Everything is deterministic given the config and seeds,
//! and the serialized report embeds the config so a run can be replayed
//! exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use normbench_core::metrics::ErrorPair;
use normbench_core::rnn::{NetSpec, OutputMode, RnnModel, TrainConfig};
use normbench_core::scale::{self, Method, ScaleError, ScalerParams};
use normbench_core::series::{
    synth_ohlc, SampleSet, SeriesError, SplitIndices, TimeSeriesTable,
};

use crate::csv_io::{self, CsvError};

/// Where a dataset comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    /// An OHLC CSV file on disk.
    Csv { path: String },
    /// The seeded synthetic generator.
    Synthetic { seed: u64, length: usize },
}

/// Full sweep configuration. Serialized into the report for exact replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSource>,
    pub methods: Vec<Method>,
    pub hidden_dims: Vec<usize>,
    pub window_len: usize,
    pub horizon: usize,
    pub train_frac: f64,
    pub val_frac: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub early_stop_patience: usize,
    pub shuffle: bool,
    pub seeds: Vec<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            methods: Method::ALL.to_vec(),
            hidden_dims: vec![20],
            window_len: 10,
            horizon: 0,
            train_frac: 0.70,
            val_frac: 0.15,
            learning_rate: 0.01,
            epochs: 100,
            early_stop_patience: 10,
            shuffle: true,
            seeds: vec![1],
        }
    }
}

/// Price-space evaluation of one cell. Absent when the fitted scaler cannot
/// invert the model's outputs (e.g. the sigmoid saturates on price-scale
/// data, so its inverse is undefined at 1.0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSpaceResult {
    pub errors: ErrorPair,
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
}

/// Everything recorded for one completed (dataset, method, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub split: SplitIndices,
    pub scalers: Vec<ScalerParams>,
    pub normalized: ErrorPair,
    pub test_dates: Vec<String>,
    pub test_actual_normalized: Vec<f64>,
    pub test_predicted_normalized: Vec<f64>,
    pub price_space: Option<PriceSpaceResult>,
    /// Why price space is absent, when it is.
    pub price_space_error: Option<String>,
    pub epochs_run: usize,
    pub best_val_mse: f64,
    pub final_train_mse: f64,
}

/// Outcome of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum CellOutcome {
    Completed(Box<CellResult>),
    Failed { error: String },
}

/// One report entry per requested (dataset, method, seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub dataset: String,
    pub method: Method,
    pub seed: u64,
    pub outcome: CellOutcome,
}

impl CellReport {
    pub fn result(&self) -> Option<&CellResult> {
        match &self.outcome {
            CellOutcome::Completed(result) => Some(result),
            CellOutcome::Failed { .. } => None,
        }
    }
}

/// Median errors of one (dataset, method) group across its successful seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub dataset: String,
    pub method: Method,
    pub seeds_completed: usize,
    pub seeds_requested: usize,
    pub median_normalized: Option<ErrorPair>,
    pub median_price: Option<ErrorPair>,
}

/// Full sweep output: the config that produced it, every cell, and
/// per-(dataset, method) medians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
    pub summaries: Vec<MethodSummary>,
}

impl ExperimentReport {
    pub fn summary_for(&self, dataset: &str, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.dataset == dataset && s.method == method)
    }
}

#[derive(Debug)]
pub enum ExperimentError {
    EmptyConfig(&'static str),
    Csv(CsvError),
    Series(SeriesError),
    AllCellsFailed,
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::EmptyConfig(what) => {
                write!(f, "experiment config needs at least one {what}")
            }
            ExperimentError::Csv(e) => write!(f, "{e}"),
            ExperimentError::Series(e) => write!(f, "{e}"),
            ExperimentError::AllCellsFailed => {
                write!(f, "every cell of the sweep failed; nothing to report")
            }
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<CsvError> for ExperimentError {
    fn from(e: CsvError) -> Self {
        ExperimentError::Csv(e)
    }
}

impl From<SeriesError> for ExperimentError {
    fn from(e: SeriesError) -> Self {
        ExperimentError::Series(e)
    }
}

/// Loads a dataset source into a table.
pub fn load_dataset(source: &DatasetSource) -> Result<TimeSeriesTable, ExperimentError> {
    match source {
        DatasetSource::Csv { path } => {
            let parsed = csv_io::read_ohlc_csv(std::path::Path::new(path))?;
            if parsed.dropped_rows > 0 {
                eprintln!(
                    "warning: dropped {} malformed row(s) from {}",
                    parsed.dropped_rows, path
                );
            }
            Ok(parsed.table)
        }
        DatasetSource::Synthetic { seed, length } => Ok(synth_ohlc(*seed, *length)),
    }
}

/// Runs the full sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    if config.datasets.is_empty() {
        return Err(ExperimentError::EmptyConfig("dataset"));
    }
    if config.methods.is_empty() {
        return Err(ExperimentError::EmptyConfig("method"));
    }
    if config.seeds.is_empty() {
        return Err(ExperimentError::EmptyConfig("seed"));
    }

    let mut tables = Vec::with_capacity(config.datasets.len());
    for source in &config.datasets {
        let table = load_dataset(source)?;
        let name = unique_name(table.name(), &tables);
        tables.push((name, table));
    }

    let mut cells = Vec::new();
    for (name, table) in &tables {
        for &method in &config.methods {
            for &seed in &config.seeds {
                let outcome = match run_cell(config, table, method, seed) {
                    Ok(result) => CellOutcome::Completed(Box::new(result)),
                    Err(error) => CellOutcome::Failed { error },
                };
                cells.push(CellReport { dataset: name.clone(), method, seed, outcome });
            }
        }
    }
    if cells.iter().all(|c| c.result().is_none()) {
        return Err(ExperimentError::AllCellsFailed);
    }

    let summaries = summarize(config, &tables, &cells);
    Ok(ExperimentReport { config: config.clone(), cells, summaries })
}

fn unique_name(base: &str, taken: &[(String, TimeSeriesTable)]) -> String {
    if !taken.iter().any(|(n, _)| n == base) {
        return base.to_string();
    }
    let mut i = 2;
    loop {
        let candidate = format!("{base}-{i}");
        if !taken.iter().any(|(n, _)| *n == candidate) {
            return candidate;
        }
        i += 1;
    }
}

fn summarize(
    config: &ExperimentConfig,
    tables: &[(String, TimeSeriesTable)],
    cells: &[CellReport],
) -> Vec<MethodSummary> {
    let mut summaries = Vec::new();
    for (name, _) in tables {
        for &method in &config.methods {
            let group: Vec<&CellResult> = cells
                .iter()
                .filter(|c| &c.dataset == name && c.method == method)
                .filter_map(CellReport::result)
                .collect();
            let norm_mse: Vec<f64> = group.iter().map(|r| r.normalized.mse).collect();
            let norm_mae: Vec<f64> = group.iter().map(|r| r.normalized.mae).collect();
            let price: Vec<&ErrorPair> =
                group.iter().filter_map(|r| r.price_space.as_ref()).map(|p| &p.errors).collect();
            let price_mse: Vec<f64> = price.iter().map(|e| e.mse).collect();
            let price_mae: Vec<f64> = price.iter().map(|e| e.mae).collect();
            summaries.push(MethodSummary {
                dataset: name.clone(),
                method,
                seeds_completed: group.len(),
                seeds_requested: config.seeds.len(),
                median_normalized: median(&norm_mse)
                    .zip(median(&norm_mae))
                    .map(|(mse, mae)| ErrorPair { mse, mae }),
                median_price: median(&price_mse)
                    .zip(median(&price_mae))
                    .map(|(mse, mae)| ErrorPair { mse, mae }),
            });
        }
    }
    summaries
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite error values"));
    let n = sorted.len();
    Some(if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 })
}

/// Runs one (dataset, method, seed) cell. Errors come back as strings so the
/// sweep can record them and continue.
fn run_cell(
    config: &ExperimentConfig,
    table: &TimeSeriesTable,
    method: Method,
    seed: u64,
) -> Result<CellResult, String> {
    let split = SplitIndices::from_len(table.len(), config.train_frac, config.val_frac)
        .map_err(|e| e.to_string())?;

    // One scaler per attribute, fitted on the training rows only.
    let columns = vec![table.opens(), table.highs(), table.lows(), table.closes()];
    let (normalized, scalers) =
        scale::fit_transform_columns(method, &columns, 0..split.train_len)
            .map_err(|e| e.to_string())?;
    let [open_n, high_n, low_n, close_n]: [Vec<f64>; 4] =
        normalized.try_into().expect("four columns in, four out");

    let samples = SampleSet::from_columns(
        &[&open_n, &high_n, &low_n],
        &close_n,
        config.window_len,
        config.horizon,
    )
    .map_err(|e| e.to_string())?;
    let (train_set, val_set, test_set) =
        samples.partition_by_target(&split).map_err(|e| e.to_string())?;

    let spec = NetSpec::new(3, config.hidden_dims.clone(), 1, OutputMode::Linear)
        .map_err(|e| e.to_string())?;
    let model = RnnModel::init(spec, seed).map_err(|e| e.to_string())?;
    let train_cfg = TrainConfig {
        learning_rate: config.learning_rate,
        epochs: config.epochs,
        seed,
        shuffle: config.shuffle,
        early_stop_patience: config.early_stop_patience,
    };
    let (model, history) =
        model.train(&train_set, &val_set, &train_cfg).map_err(|e| e.to_string())?;

    let predicted_normalized = model.predict(&test_set).map_err(|e| e.to_string())?;
    let actual_normalized = test_set.targets();
    let normalized_errors = ErrorPair::compute(&predicted_normalized, &actual_normalized)
        .map_err(|e| e.to_string())?;

    // Test-set dates follow from the rows the samples predict.
    let offset = samples.len() - test_set.len();
    let test_dates: Vec<String> = (0..test_set.len())
        .map(|i| table.records()[samples.target_row(offset + i)].date.to_string())
        .collect();

    // Price space: invert predictions and targets with the close scaler.
    let close_scaler = &scalers[3];
    let price_space = invert_series(close_scaler, &predicted_normalized, &actual_normalized);
    let (price_space, price_space_error) = match price_space {
        Ok(result) => (Some(result), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let best_val_mse =
        history.iter().map(|h| h.val_mse).fold(f64::INFINITY, f64::min);
    Ok(CellResult {
        split,
        scalers,
        normalized: normalized_errors,
        test_dates,
        test_actual_normalized: actual_normalized,
        test_predicted_normalized: predicted_normalized,
        price_space,
        price_space_error,
        epochs_run: history.len(),
        best_val_mse,
        final_train_mse: history.last().map(|h| h.train_mse).unwrap_or(f64::NAN),
    })
}

fn invert_series(
    scaler: &ScalerParams,
    predicted_normalized: &[f64],
    actual_normalized: &[f64],
) -> Result<PriceSpaceResult, ScaleError> {
    let predicted: Vec<f64> = predicted_normalized
        .iter()
        .map(|&y| scale::inverse(scaler, y))
        .collect::<Result<_, _>>()?;
    let actual: Vec<f64> = actual_normalized
        .iter()
        .map(|&y| scale::inverse(scaler, y))
        .collect::<Result<_, _>>()?;
    let errors = ErrorPair::compute(&predicted, &actual).expect("equal non-empty lengths");
    Ok(PriceSpaceResult { errors, actual, predicted })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config(datasets: Vec<DatasetSource>, methods: Vec<Method>) -> ExperimentConfig {
        ExperimentConfig {
            datasets,
            methods,
            hidden_dims: vec![6],
            epochs: 8,
            early_stop_patience: 4,
            seeds: vec![1],
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn sweep_has_one_cell_per_dataset_method_seed() {
        let mut config = quick_config(
            vec![
                DatasetSource::Synthetic { seed: 7, length: 120 },
                DatasetSource::Synthetic { seed: 8, length: 130 },
            ],
            Method::ALL.to_vec(),
        );
        config.seeds = vec![1];
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.cells.len(), 12);
        assert_eq!(report.summaries.len(), 12);
    }

    #[test]
    fn a_493_row_input_records_the_345_74_74_split() {
        let config = quick_config(
            vec![DatasetSource::Synthetic { seed: 7, length: 493 }],
            vec![Method::MinMax],
        );
        let report = run_experiment(&config).unwrap();
        let result = report.cells[0].result().unwrap();
        assert_eq!(
            result.split,
            SplitIndices { train_len: 345, val_len: 74, test_len: 74 }
        );
        assert_eq!(result.test_dates.len(), 74);
        assert_eq!(result.test_predicted_normalized.len(), 74);
        assert_eq!(result.scalers.len(), 4);
    }

    #[test]
    fn replaying_the_embedded_config_reproduces_the_report() {
        let config = quick_config(
            vec![DatasetSource::Synthetic { seed: 3, length: 100 }],
            vec![Method::MinMax, Method::TanhEstimator],
        );
        let first = run_experiment(&config).unwrap();
        let second = run_experiment(&first.config).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn cells_are_independent_of_which_methods_run_alongside() {
        let solo = run_experiment(&quick_config(
            vec![DatasetSource::Synthetic { seed: 5, length: 90 }],
            vec![Method::ZScore],
        ))
        .unwrap();
        let together = run_experiment(&quick_config(
            vec![DatasetSource::Synthetic { seed: 5, length: 90 }],
            vec![Method::MinMax, Method::ZScore, Method::Median],
        ))
        .unwrap();
        let solo_cell = solo.cells[0].result().unwrap();
        let with_others = together
            .cells
            .iter()
            .find(|c| c.method == Method::ZScore)
            .unwrap()
            .result()
            .unwrap();
        assert_eq!(solo_cell, with_others);
    }

    #[test]
    fn normalized_predictions_invert_to_the_stored_price_predictions() {
        let config = quick_config(
            vec![DatasetSource::Synthetic { seed: 11, length: 150 }],
            vec![Method::MinMax, Method::ZScore, Method::TanhEstimator],
        );
        let report = run_experiment(&config).unwrap();
        for cell in &report.cells {
            let result = cell.result().unwrap();
            let price = result.price_space.as_ref().expect("invertible methods");
            for (norm, stored) in
                result.test_predicted_normalized.iter().zip(&price.predicted)
            {
                let inverted = scale::inverse(&result.scalers[3], *norm).unwrap();
                let rel = (inverted - stored).abs() / stored.abs().max(1.0);
                assert!(rel <= 1e-9, "{inverted} vs {stored}");
            }
        }
    }

    #[test]
    fn sigmoid_on_price_scale_data_loses_price_space_but_keeps_normalized() {
        let config = quick_config(
            vec![DatasetSource::Synthetic { seed: 2, length: 120 }],
            vec![Method::Sigmoid],
        );
        let report = run_experiment(&config).unwrap();
        let result = report.cells[0].result().unwrap();
        // sigmoid saturates at price scale: every normalized value is 1.0,
        // which has no finite preimage
        assert!(result.price_space.is_none());
        assert!(result.price_space_error.is_some());
        assert!(result.normalized.mse.is_finite());
    }

    #[test]
    fn degenerate_cells_fail_without_sinking_the_sweep() {
        // a two-point table cannot satisfy the split preconditions at any
        // length under 3, and constant columns break min-max; use a table
        // whose close column is constant over the training rows
        let mut records = Vec::new();
        let mut date = normbench_core::date::Date::new(2016, 1, 1).unwrap();
        for i in 0..60 {
            let wiggle = if i >= 55 { 2.0 } else { 0.0 };
            records.push(
                normbench_core::series::OhlcRecord::new(
                    date,
                    10.0 + 0.1 * (i % 7) as f64,
                    11.0 + wiggle,
                    9.0,
                    10.0 + wiggle,
                )
                .unwrap(),
            );
            date = date.succ();
        }
        let table = TimeSeriesTable::new("const-close", records).unwrap();
        // write it to CSV and load through the file path to cover that route
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("const-close.csv");
        std::fs::write(&path, crate::csv_io::to_csv_string(&table)).unwrap();

        let config = quick_config(
            vec![DatasetSource::Csv { path: path.display().to_string() }],
            vec![Method::MinMax, Method::Median],
        );
        let report = run_experiment(&config).unwrap();
        let min_max = report.cells.iter().find(|c| c.method == Method::MinMax).unwrap();
        assert!(matches!(min_max.outcome, CellOutcome::Failed { .. }));
        let median = report.cells.iter().find(|c| c.method == Method::Median).unwrap();
        assert!(median.result().is_some());
        // summary reflects the partial completion
        let s = report.summary_for("const-close", Method::MinMax).unwrap();
        assert_eq!(s.seeds_completed, 0);
        assert!(s.median_normalized.is_none());
    }

    #[test]
    fn all_failed_sweep_is_an_error() {
        let config = quick_config(
            vec![DatasetSource::Synthetic { seed: 1, length: 5 }],
            vec![Method::MinMax],
        );
        // 5 rows cannot be split 70/15/15 with window 10
        assert!(matches!(run_experiment(&config), Err(ExperimentError::AllCellsFailed)));
    }

    #[test]
    fn missing_csv_is_a_load_error_naming_the_path() {
        let config = quick_config(
            vec![DatasetSource::Csv { path: "missing.csv".into() }],
            vec![Method::MinMax],
        );
        let err = run_experiment(&config).unwrap_err();
        assert!(err.to_string().contains("missing.csv"));
    }
}
