//! Core algorithms of the normalization benchmark: OHLC series handling,
//! the six normalization methods, a recurrent forecaster trained by
//! backpropagation through time, and forecast error metrics.
//!
//! The crate is `no_std` (with `alloc`) and fully deterministic: every
//! source of randomness is a seeded generator, and all transcendental math
//! goes through `libm` so results do not depend on the platform's libm.
//! File formats, CSV ingestion, and the benchmark CLI live in the companion
//! `normbench-cli` crate.

#![no_std]

extern crate alloc;

pub mod date;
pub mod matrix;
pub mod metrics;
pub mod rng;
pub mod rnn;
pub mod scale;
pub mod series;

pub use date::Date;
pub use metrics::{mae, mse, ErrorPair};
pub use rnn::{NetSpec, OutputMode, RnnModel, TrainConfig};
pub use scale::{fit, fit_min_max, fit_transform_columns, inverse, transform, Method, ScalerParams};
pub use series::{
    chronological_split, make_samples, synth_ohlc, OhlcRecord, SampleSet, SplitIndices,
    TimeSeriesTable,
};
