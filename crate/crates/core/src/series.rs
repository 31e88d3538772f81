//! Daily OHLC series: validated records, chronological splitting, sliding
//! windows, and a seeded synthetic generator for self-contained runs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use libm::{ceil, floor};

use crate::date::Date;
use crate::rng::SplitMix64;

/// One day of open/high/low/close prices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhlcRecord {
    pub date: Date,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
}

impl OhlcRecord {
    /// Builds a record, rejecting non-finite or non-positive prices and any
    /// violation of `low <= open <= high` / `low <= close <= high`.
    pub fn new(date: Date, open: f64, high: f64, low: f64, close: f64) -> Result<Self, SeriesError> {
        let prices = [open, high, low, close];
        if prices.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(SeriesError::InvalidPrice { date });
        }
        if low > open || open > high || low > close || close > high {
            return Err(SeriesError::InconsistentOhlc { date });
        }
        Ok(Self { date, open, high, low, close })
    }
}

/// A named, date-ordered OHLC series. Construction guarantees at least one
/// record and strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesTable {
    name: String,
    records: Vec<OhlcRecord>,
}

impl TimeSeriesTable {
    pub fn new(name: impl Into<String>, records: Vec<OhlcRecord>) -> Result<Self, SeriesError> {
        if records.is_empty() {
            return Err(SeriesError::Empty);
        }
        for pair in records.windows(2) {
            if pair[1].date <= pair[0].date {
                return Err(SeriesError::DatesNotIncreasing { date: pair[1].date });
            }
        }
        Ok(Self { name: name.into(), records })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn records(&self) -> &[OhlcRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn opens(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.open).collect()
    }

    pub fn highs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.high).collect()
    }

    pub fn lows(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.low).collect()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.close).collect()
    }

    /// The record slices of the three chronological segments.
    pub fn segments(&self, split: &SplitIndices) -> (&[OhlcRecord], &[OhlcRecord], &[OhlcRecord]) {
        let train_end = split.train_len;
        let val_end = train_end + split.val_len;
        (&self.records[..train_end], &self.records[train_end..val_end], &self.records[val_end..])
    }
}

/// Lengths of the contiguous train/validation/test segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitIndices {
    pub train_len: usize,
    pub val_len: usize,
    pub test_len: usize,
}

impl SplitIndices {
    /// Splits `len` rows as `floor(train_frac * len)` train rows,
    /// `ceil(val_frac * len)` validation rows, and the remainder for test.
    pub fn from_len(len: usize, train_frac: f64, val_frac: f64) -> Result<Self, SeriesError> {
        if !(train_frac > 0.0 && val_frac > 0.0 && train_frac + val_frac < 1.0)
            || !train_frac.is_finite()
            || !val_frac.is_finite()
        {
            return Err(SeriesError::BadFractions { train_frac, val_frac });
        }
        if len < 3 {
            return Err(SeriesError::TooShort { needed: 3, got: len });
        }
        let train_len = floor(train_frac * len as f64) as usize;
        let val_len = ceil(val_frac * len as f64) as usize;
        if train_len == 0 || val_len == 0 || train_len + val_len >= len {
            return Err(SeriesError::EmptySegment);
        }
        let test_len = len - train_len - val_len;
        Ok(Self { train_len, val_len, test_len })
    }

    pub fn total(&self) -> usize {
        self.train_len + self.val_len + self.test_len
    }
}

impl fmt::Display for SplitIndices {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.train_len, self.val_len, self.test_len)
    }
}

/// Chronological split of a table: contiguous segments, no shuffling.
pub fn chronological_split(
    table: &TimeSeriesTable,
    train_frac: f64,
    val_frac: f64,
) -> Result<SplitIndices, SeriesError> {
    SplitIndices::from_len(table.len(), train_frac, val_frac)
}

/// One supervised sample: a window of per-step feature vectors and the
/// scalar value to predict.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<Vec<f64>>,
    pub target: f64,
}

/// Windowed samples sharing one window length and forecast horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<Sample>,
    window_len: usize,
    horizon: usize,
}

impl SampleSet {
    /// Windows parallel feature series against a target series.
    ///
    /// Sample `i` covers steps `i .. i + window_len` of every feature column
    /// and predicts `targets[i + window_len - 1 + horizon]`.
    pub fn from_columns(
        features: &[&[f64]],
        targets: &[f64],
        window_len: usize,
        horizon: usize,
    ) -> Result<Self, SeriesError> {
        if features.is_empty() || window_len == 0 {
            return Err(SeriesError::BadWindow);
        }
        let n = targets.len();
        if features.iter().any(|col| col.len() != n) {
            return Err(SeriesError::ColumnLengthMismatch);
        }
        if n < window_len + horizon {
            return Err(SeriesError::TooShort { needed: window_len + horizon, got: n });
        }
        let count = n - window_len - horizon + 1;
        let mut samples = Vec::with_capacity(count);
        for i in 0..count {
            let input = (i..i + window_len)
                .map(|step| features.iter().map(|col| col[step]).collect())
                .collect();
            samples.push(Sample { input, target: targets[i + window_len - 1 + horizon] });
        }
        Ok(Self { samples, window_len, horizon })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Features per step.
    pub fn feature_dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.input.first().map_or(0, Vec::len))
    }

    /// Row of the underlying series that sample `i` predicts.
    pub fn target_row(&self, i: usize) -> usize {
        i + self.window_len - 1 + self.horizon
    }

    pub fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.target).collect()
    }

    /// Partitions samples by the segment their target row falls in. Windows
    /// are allowed to reach back across a segment boundary; only the
    /// predicted row decides membership. Errors if any segment ends up with
    /// no samples.
    pub fn partition_by_target(
        &self,
        split: &SplitIndices,
    ) -> Result<(SampleSet, SampleSet, SampleSet), SeriesError> {
        let n = self.len() + self.window_len + self.horizon - 1;
        if split.total() != n {
            return Err(SeriesError::SplitMismatch { split_total: split.total(), series_len: n });
        }
        let mut parts: [Vec<Sample>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (i, sample) in self.samples.iter().enumerate() {
            let row = self.target_row(i);
            let part = if row < split.train_len {
                0
            } else if row < split.train_len + split.val_len {
                1
            } else {
                2
            };
            parts[part].push(sample.clone());
        }
        if parts.iter().any(Vec::is_empty) {
            return Err(SeriesError::EmptySegment);
        }
        let [train, val, test] = parts;
        let mk = |samples| SampleSet { samples, window_len: self.window_len, horizon: self.horizon };
        Ok((mk(train), mk(val), mk(test)))
    }
}

/// Windows an OHLC table into supervised samples: per-step features are
/// `[open, high, low]` and the target is the close.
pub fn make_samples(
    table: &TimeSeriesTable,
    window_len: usize,
    horizon: usize,
) -> Result<SampleSet, SeriesError> {
    let opens = table.opens();
    let highs = table.highs();
    let lows = table.lows();
    let closes = table.closes();
    SampleSet::from_columns(&[&opens, &highs, &lows], &closes, window_len, horizon)
}

/// Deterministic synthetic OHLC series: a positive random-walk close with
/// open/high/low derived so every record invariant holds. Same seed, same
/// table.
///
/// Panics if `n` is zero.
pub fn synth_ohlc(seed: u64, n: usize) -> TimeSeriesTable {
    assert!(n >= 1, "synthetic series needs at least one row");
    let mut rng = SplitMix64::new(seed);
    let mut records = Vec::with_capacity(n);
    let mut date = Date::new(2016, 1, 1).expect("valid start date");
    let mut prev_close = 100.0;
    for _ in 0..n {
        let gap = 1.0 + 0.004 * (rng.next_f64() - 0.5);
        let open = (prev_close * gap).max(0.01);
        let step = 0.0003 + 0.012 * rng.next_normal();
        let close = (open * (1.0 + step)).max(0.01);
        let high = open.max(close) * (1.0 + 0.006 * rng.next_f64());
        let low = open.min(close) * (1.0 - 0.006 * rng.next_f64());
        records.push(
            OhlcRecord::new(date, open, high, low, close).expect("generated record is valid"),
        );
        date = date.succ();
        prev_close = close;
    }
    TimeSeriesTable::new(format!("synthetic-{seed}"), records).expect("generated table is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesError {
    Empty,
    DatesNotIncreasing { date: Date },
    InvalidPrice { date: Date },
    InconsistentOhlc { date: Date },
    BadFractions { train_frac: f64, val_frac: f64 },
    EmptySegment,
    TooShort { needed: usize, got: usize },
    BadWindow,
    ColumnLengthMismatch,
    SplitMismatch { split_total: usize, series_len: usize },
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::Empty => write!(f, "a series needs at least one record"),
            SeriesError::DatesNotIncreasing { date } => {
                write!(f, "dates must be strictly increasing (violated at {date})")
            }
            SeriesError::InvalidPrice { date } => {
                write!(f, "prices must be finite and positive (violated at {date})")
            }
            SeriesError::InconsistentOhlc { date } => {
                write!(f, "open/close must lie within [low, high] (violated at {date})")
            }
            SeriesError::BadFractions { train_frac, val_frac } => write!(
                f,
                "split fractions must be positive and sum below 1 (got {train_frac} and {val_frac})"
            ),
            SeriesError::EmptySegment => write!(f, "every split segment needs at least one entry"),
            SeriesError::TooShort { needed, got } => {
                write!(f, "series too short: need {needed} rows, got {got}")
            }
            SeriesError::BadWindow => {
                write!(f, "windowing needs at least one feature column and window_len >= 1")
            }
            SeriesError::ColumnLengthMismatch => {
                write!(f, "feature and target columns must have equal length")
            }
            SeriesError::SplitMismatch { split_total, series_len } => {
                write!(f, "split covers {split_total} rows but the series has {series_len}")
            }
        }
    }
}

impl core::error::Error for SeriesError {}
