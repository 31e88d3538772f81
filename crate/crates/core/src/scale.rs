//! The six data-normalization methods compared by the benchmark, each as a
//! fit / transform / inverse triple.
//!
//! * min-max — rescale the fitted data range onto `[low, high]`
//! * decimal scaling — divide by the smallest power of ten that brings every
//!   fitted magnitude below one
//! * z-score — center on the mean, divide by the population standard deviation
//! * median — divide by the fitted median
//! * sigmoid — logistic squash, `1 / (1 + e^-x)` (parameter-free)
//! * tanh estimator — Hampel's robust scaler,
//!   `0.5 * (tanh(0.01 * (x - mean) / sd) + 1)`
//!
//! Statistics are computed over exactly the values passed to [`fit`]; the
//! training/evaluation split policy belongs to the caller. All transforms are
//! strictly monotone (the median scaler follows the sign of its median), so
//! each one has the closed-form inverse implemented by [`inverse`].

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use libm::{atanh, exp, fabs, log, sqrt, tanh};

/// Identifies one of the six normalization methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    MinMax,
    DecimalScaling,
    ZScore,
    Median,
    Sigmoid,
    TanhEstimator,
}

impl Method {
    /// All six methods, in the order reports list them.
    pub const ALL: [Method; 6] = [
        Method::MinMax,
        Method::DecimalScaling,
        Method::ZScore,
        Method::Median,
        Method::Sigmoid,
        Method::TanhEstimator,
    ];

    /// Human-readable name for tables.
    pub fn name(&self) -> &'static str {
        match self {
            Method::MinMax => "MinMax",
            Method::DecimalScaling => "Decimal Scaling",
            Method::ZScore => "Z-Score",
            Method::Median => "Median",
            Method::Sigmoid => "Sigmoid",
            Method::TanhEstimator => "Tanh Estimator",
        }
    }

    /// Stable identifier used in flags and file names.
    pub fn id(&self) -> &'static str {
        match self {
            Method::MinMax => "min-max",
            Method::DecimalScaling => "decimal",
            Method::ZScore => "z-score",
            Method::Median => "median",
            Method::Sigmoid => "sigmoid",
            Method::TanhEstimator => "tanh",
        }
    }

    pub fn from_id(id: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.id() == id)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fitted statistics of one method over one attribute.
///
/// Values are validated by [`fit`]; building a variant by hand bypasses those
/// checks and the transform makes no promises for it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "method"))]
pub enum ScalerParams {
    MinMax { data_min: f64, data_max: f64, range_low: f64, range_high: f64 },
    DecimalScaling { exponent: u32 },
    ZScore { mean: f64, std_dev: f64 },
    Median { median: f64 },
    Sigmoid,
    TanhEstimator { mean: f64, std_dev: f64 },
}

impl ScalerParams {
    pub fn method(&self) -> Method {
        match self {
            ScalerParams::MinMax { .. } => Method::MinMax,
            ScalerParams::DecimalScaling { .. } => Method::DecimalScaling,
            ScalerParams::ZScore { .. } => Method::ZScore,
            ScalerParams::Median { .. } => Method::Median,
            ScalerParams::Sigmoid => Method::Sigmoid,
            ScalerParams::TanhEstimator { .. } => Method::TanhEstimator,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScaleError {
    /// fit was handed an empty column.
    EmptyColumn,
    /// fit was handed a NaN or infinity.
    NonFinite,
    /// The fitted statistic leaves the method undefined
    /// (zero spread, zero standard deviation, zero median).
    DegenerateColumn { method: Method },
    /// Target range for min-max must satisfy high > low.
    BadRange,
    /// inverse was handed a value outside the method's output domain.
    OutOfDomain { method: Method, value: f64 },
    /// fit_transform_columns was handed an empty or out-of-bounds fit range.
    BadFitRows { len: usize, start: usize, end: usize },
}

impl fmt::Display for ScaleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleError::EmptyColumn => write!(f, "cannot fit a scaler on an empty column"),
            ScaleError::NonFinite => write!(f, "cannot fit a scaler on non-finite values"),
            ScaleError::DegenerateColumn { method } => {
                write!(f, "{method} is undefined for this column (degenerate statistics)")
            }
            ScaleError::BadRange => write!(f, "min-max target range must satisfy high > low"),
            ScaleError::OutOfDomain { method, value } => {
                write!(f, "{value} is outside the invertible domain of {method}")
            }
            ScaleError::BadFitRows { len, start, end } => {
                write!(f, "fit rows {start}..{end} invalid for {len}-row columns")
            }
        }
    }
}

impl core::error::Error for ScaleError {}

fn ensure_finite(column: &[f64]) -> Result<(), ScaleError> {
    if column.iter().any(|x| !x.is_finite()) {
        return Err(ScaleError::NonFinite);
    }
    Ok(())
}

/// Population mean and standard deviation.
fn mean_and_std(column: &[f64]) -> (f64, f64) {
    let n = column.len() as f64;
    let mean = column.iter().sum::<f64>() / n;
    let var = column.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, sqrt(var))
}

/// Median; an even-length column gets the mean of the two middle values.
fn median_of(column: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = column.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Smallest d with max(|x|) / 10^d < 1.
fn decimal_exponent(column: &[f64]) -> u32 {
    let max_abs = column.iter().fold(0.0, |acc: f64, x| acc.max(fabs(*x)));
    let mut d = 0u32;
    let mut divisor = 1.0;
    while max_abs / divisor >= 1.0 {
        d += 1;
        divisor *= 10.0;
    }
    d
}

fn pow10(d: u32) -> f64 {
    let mut p = 1.0;
    for _ in 0..d {
        p *= 10.0;
    }
    p
}

/// Fits `method` on a column, with min-max targeting `[0, 1]`.
pub fn fit(method: Method, column: &[f64]) -> Result<ScalerParams, ScaleError> {
    match method {
        Method::MinMax => fit_min_max(column, 0.0, 1.0),
        Method::DecimalScaling => {
            if column.is_empty() {
                return Err(ScaleError::EmptyColumn);
            }
            ensure_finite(column)?;
            Ok(ScalerParams::DecimalScaling { exponent: decimal_exponent(column) })
        }
        Method::ZScore | Method::TanhEstimator => {
            if column.is_empty() {
                return Err(ScaleError::EmptyColumn);
            }
            ensure_finite(column)?;
            let (mean, std_dev) = mean_and_std(column);
            if std_dev == 0.0 {
                return Err(ScaleError::DegenerateColumn { method });
            }
            Ok(match method {
                Method::ZScore => ScalerParams::ZScore { mean, std_dev },
                _ => ScalerParams::TanhEstimator { mean, std_dev },
            })
        }
        Method::Median => {
            if column.is_empty() {
                return Err(ScaleError::EmptyColumn);
            }
            ensure_finite(column)?;
            let median = median_of(column);
            if median == 0.0 {
                return Err(ScaleError::DegenerateColumn { method });
            }
            Ok(ScalerParams::Median { median })
        }
        Method::Sigmoid => {
            if column.is_empty() {
                return Err(ScaleError::EmptyColumn);
            }
            ensure_finite(column)?;
            Ok(ScalerParams::Sigmoid)
        }
    }
}

/// Fits a min-max scaler with a custom target range `[low, high]`.
pub fn fit_min_max(column: &[f64], low: f64, high: f64) -> Result<ScalerParams, ScaleError> {
    if column.is_empty() {
        return Err(ScaleError::EmptyColumn);
    }
    ensure_finite(column)?;
    if !low.is_finite() || !high.is_finite() || high <= low {
        return Err(ScaleError::BadRange);
    }
    let data_min = column.iter().copied().fold(f64::INFINITY, f64::min);
    let data_max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if data_max == data_min {
        return Err(ScaleError::DegenerateColumn { method: Method::MinMax });
    }
    Ok(ScalerParams::MinMax { data_min, data_max, range_low: low, range_high: high })
}

/// Applies the fitted forward map to one value.
///
/// Values outside the fitted range are transformed with the same statistics,
/// so a min-max output may leave `[low, high]` and a decimal-scaling output
/// may leave `(-1, 1)`; that is intentional when scoring unseen data.
pub fn transform(params: &ScalerParams, x: f64) -> f64 {
    match *params {
        ScalerParams::MinMax { data_min, data_max, range_low, range_high } => {
            range_low + (range_high - range_low) * (x - data_min) / (data_max - data_min)
        }
        ScalerParams::DecimalScaling { exponent } => x / pow10(exponent),
        ScalerParams::ZScore { mean, std_dev } => (x - mean) / std_dev,
        ScalerParams::Median { median } => x / median,
        ScalerParams::Sigmoid => 1.0 / (1.0 + exp(-x)),
        ScalerParams::TanhEstimator { mean, std_dev } => {
            0.5 * (tanh(0.01 * (x - mean) / std_dev) + 1.0)
        }
    }
}

/// Inverts the forward map. Sigmoid and tanh-estimator outputs must lie in
/// the open interval `(0, 1)`.
pub fn inverse(params: &ScalerParams, y: f64) -> Result<f64, ScaleError> {
    match *params {
        ScalerParams::MinMax { data_min, data_max, range_low, range_high } => {
            Ok(data_min + (y - range_low) * (data_max - data_min) / (range_high - range_low))
        }
        ScalerParams::DecimalScaling { exponent } => Ok(y * pow10(exponent)),
        ScalerParams::ZScore { mean, std_dev } => Ok(mean + y * std_dev),
        ScalerParams::Median { median } => Ok(y * median),
        ScalerParams::Sigmoid => {
            if !(y > 0.0 && y < 1.0) {
                return Err(ScaleError::OutOfDomain { method: Method::Sigmoid, value: y });
            }
            Ok(log(y / (1.0 - y)))
        }
        ScalerParams::TanhEstimator { mean, std_dev } => {
            if !(y > 0.0 && y < 1.0) {
                return Err(ScaleError::OutOfDomain { method: Method::TanhEstimator, value: y });
            }
            Ok(mean + 100.0 * std_dev * atanh(2.0 * y - 1.0))
        }
    }
}

/// Fits one scaler per column on `fit_rows`, then transforms every row of
/// every column with its scaler. Returns the transformed columns and the
/// fitted parameters in column order.
pub fn fit_transform_columns(
    method: Method,
    columns: &[Vec<f64>],
    fit_rows: Range<usize>,
) -> Result<(Vec<Vec<f64>>, Vec<ScalerParams>), ScaleError> {
    let len = columns.first().map_or(0, Vec::len);
    if fit_rows.is_empty() || fit_rows.end > len {
        return Err(ScaleError::BadFitRows { len, start: fit_rows.start, end: fit_rows.end });
    }
    let mut transformed = Vec::with_capacity(columns.len());
    let mut params = Vec::with_capacity(columns.len());
    for column in columns {
        let p = fit(method, &column[fit_rows.clone()])?;
        transformed.push(column.iter().map(|&x| transform(&p, x)).collect());
        params.push(p);
    }
    Ok((transformed, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        fabs(a - b) <= tol * fabs(b).max(1.0)
    }

    #[test]
    fn min_max_fit_finds_extrema() {
        let p = fit(Method::MinMax, &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(
            p,
            ScalerParams::MinMax { data_min: 10.0, data_max: 30.0, range_low: 0.0, range_high: 1.0 }
        );
    }

    #[test]
    fn min_max_midpoint_maps_to_half() {
        let p = fit(Method::MinMax, &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(transform(&p, 20.0), 0.5);
        assert_eq!(inverse(&p, 0.5).unwrap(), 20.0);
    }

    #[test]
    fn min_max_custom_range_reaches_its_lower_bound() {
        // With the additive low-bound offset, the fitted minimum lands on
        // `low` for any target range, not just [0, 1].
        let p = fit_min_max(&[10.0, 20.0, 30.0], -1.0, 1.0).unwrap();
        assert_eq!(transform(&p, 10.0), -1.0);
        assert_eq!(transform(&p, 30.0), 1.0);
        assert_eq!(transform(&p, 20.0), 0.0);
    }

    #[test]
    fn min_max_constant_column_is_degenerate() {
        let err = fit(Method::MinMax, &[5.0, 5.0, 5.0]).unwrap_err();
        assert_eq!(err, ScaleError::DegenerateColumn { method: Method::MinMax });
    }

    #[test]
    fn min_max_rejects_empty_range() {
        assert_eq!(fit_min_max(&[1.0, 2.0], 1.0, 1.0).unwrap_err(), ScaleError::BadRange);
    }

    #[test]
    fn decimal_scaling_picks_smallest_exponent() {
        let p = fit(Method::DecimalScaling, &[-987.0, 45.0]).unwrap();
        assert_eq!(p, ScalerParams::DecimalScaling { exponent: 3 });
        assert_eq!(transform(&p, 125.0), 0.125);
    }

    #[test]
    fn decimal_scaling_exponent_edge_cases() {
        // all zeros need no shift; an exact power of ten needs one more digit
        assert_eq!(decimal_exponent(&[0.0, 0.0]), 0);
        assert_eq!(decimal_exponent(&[0.5]), 0);
        assert_eq!(decimal_exponent(&[1.0]), 1);
        assert_eq!(decimal_exponent(&[1000.0]), 4);
        assert_eq!(decimal_exponent(&[999.9]), 3);
    }

    #[test]
    fn decimal_scaling_out_of_fit_values_may_leave_unit_interval() {
        let p = fit(Method::DecimalScaling, &[45.0, 87.0]).unwrap();
        // a later value with more digits maps outside (-1, 1); accepted
        assert_eq!(transform(&p, 250.0), 2.5);
    }

    #[test]
    fn z_score_fit_matches_population_statistics() {
        let p = fit(Method::ZScore, &[2.0, 4.0, 6.0]).unwrap();
        let ScalerParams::ZScore { mean, std_dev } = p else { panic!("wrong variant") };
        assert_eq!(mean, 4.0);
        // population sigma = sqrt(8/3)
        assert!(close(std_dev, sqrt(8.0 / 3.0), 1e-15));
        assert!(close(transform(&p, 6.0), 2.0 / sqrt(8.0 / 3.0), 1e-15));
        assert!(close(transform(&p, 6.0), 1.224_744_871_391_589, 1e-9));
    }

    #[test]
    fn z_score_constant_column_is_degenerate() {
        let err = fit(Method::ZScore, &[3.0, 3.0]).unwrap_err();
        assert_eq!(err, ScaleError::DegenerateColumn { method: Method::ZScore });
        let err = fit(Method::TanhEstimator, &[3.0, 3.0]).unwrap_err();
        assert_eq!(err, ScaleError::DegenerateColumn { method: Method::TanhEstimator });
    }

    #[test]
    fn median_fit_and_transform() {
        let p = fit(Method::Median, &[1.0, 2.0, 9.0]).unwrap();
        assert_eq!(p, ScalerParams::Median { median: 2.0 });
        assert_eq!(transform(&p, 3.0), 1.5);
    }

    #[test]
    fn median_of_even_length_column_averages_middles() {
        let p = fit(Method::Median, &[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(p, ScalerParams::Median { median: 2.5 });
    }

    #[test]
    fn median_zero_is_degenerate() {
        let err = fit(Method::Median, &[-1.0, 0.0, 1.0]).unwrap_err();
        assert_eq!(err, ScaleError::DegenerateColumn { method: Method::Median });
    }

    #[test]
    fn sigmoid_is_half_at_zero() {
        let p = fit(Method::Sigmoid, &[1.0]).unwrap();
        assert_eq!(transform(&p, 0.0), 0.5);
        assert_eq!(inverse(&p, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn sigmoid_inverse_rejects_out_of_domain() {
        let p = ScalerParams::Sigmoid;
        assert!(inverse(&p, 0.0).is_err());
        assert!(inverse(&p, 1.0).is_err());
        assert!(inverse(&p, -0.5).is_err());
    }

    #[test]
    fn tanh_estimator_is_half_at_the_mean() {
        let p = fit(Method::TanhEstimator, &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(transform(&p, 4.0), 0.5);
    }

    #[test]
    fn tanh_estimator_value_two_ways() {
        // Evaluated independently via the exp form of tanh:
        // w = 0.01 * (6 - 4) / sqrt(8/3); y = 0.5 * ((e^2w - 1)/(e^2w + 1) + 1)
        let p = fit(Method::TanhEstimator, &[2.0, 4.0, 6.0]).unwrap();
        let w = 0.01 * 2.0 / sqrt(8.0 / 3.0);
        let e2w = exp(2.0 * w);
        let expected = 0.5 * ((e2w - 1.0) / (e2w + 1.0) + 1.0);
        assert!(close(transform(&p, 6.0), expected, 1e-14));
        assert!(close(transform(&p, 6.0), 0.506_123_418_189_111, 1e-9));
    }

    #[test]
    fn non_finite_values_are_rejected_at_fit() {
        assert_eq!(fit(Method::MinMax, &[1.0, f64::NAN]).unwrap_err(), ScaleError::NonFinite);
        assert_eq!(fit(Method::ZScore, &[1.0, f64::INFINITY]).unwrap_err(), ScaleError::NonFinite);
        assert_eq!(fit(Method::Sigmoid, &[]).unwrap_err(), ScaleError::EmptyColumn);
    }

    #[test]
    fn fit_transform_returns_one_scaler_per_column() {
        let columns = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![7.0, 8.0, 9.0], vec![
            10.0, 11.0, 12.0,
        ]];
        let (out, params) = fit_transform_columns(Method::MinMax, &columns, 0..3).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(params.len(), 4);
    }

    #[test]
    fn fit_transform_fits_on_the_given_rows_only() {
        let columns = vec![vec![0.0, 10.0, 20.0, 40.0]];
        let (out, params) = fit_transform_columns(Method::MinMax, &columns, 0..3).unwrap();
        assert_eq!(params[0], ScalerParams::MinMax {
            data_min: 0.0,
            data_max: 20.0,
            range_low: 0.0,
            range_high: 1.0
        });
        // the row outside the fit range is transformed with the same scaler
        // and may exit [0, 1]
        assert_eq!(out[0][3], 2.0);
    }

    #[test]
    fn fit_transform_propagates_degeneracy() {
        let columns = vec![vec![1.0, 1.0, 5.0]];
        let err = fit_transform_columns(Method::MinMax, &columns, 0..2).unwrap_err();
        assert_eq!(err, ScaleError::DegenerateColumn { method: Method::MinMax });
    }

    #[test]
    fn fit_transform_validates_fit_rows() {
        let columns = vec![vec![1.0, 2.0]];
        assert!(fit_transform_columns(Method::MinMax, &columns, 0..0).is_err());
        assert!(fit_transform_columns(Method::MinMax, &columns, 0..3).is_err());
    }

    #[test]
    fn method_ids_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_id(m.id()), Some(m));
        }
        assert_eq!(Method::from_id("robust"), None);
    }
}
