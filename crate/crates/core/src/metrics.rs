//! Forecast error measures: mean squared error and mean absolute error.

use core::fmt;

use libm::fabs;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricError {
    Empty,
    LengthMismatch { predicted: usize, actual: usize },
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::Empty => write!(f, "error metrics need at least one value"),
            MetricError::LengthMismatch { predicted, actual } => {
                write!(f, "length mismatch: {predicted} predictions vs {actual} actuals")
            }
        }
    }
}

impl core::error::Error for MetricError {}

fn check(predicted: &[f64], actual: &[f64]) -> Result<(), MetricError> {
    if predicted.len() != actual.len() {
        return Err(MetricError::LengthMismatch {
            predicted: predicted.len(),
            actual: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(())
}

/// Mean of squared differences.
pub fn mse(predicted: &[f64], actual: &[f64]) -> Result<f64, MetricError> {
    check(predicted, actual)?;
    let sum: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| {
            let d = p - a;
            d * d
        })
        .sum();
    Ok(sum / predicted.len() as f64)
}

/// Mean of absolute differences.
pub fn mae(predicted: &[f64], actual: &[f64]) -> Result<f64, MetricError> {
    check(predicted, actual)?;
    let sum: f64 = predicted.iter().zip(actual).map(|(p, a)| fabs(p - a)).sum();
    Ok(sum / predicted.len() as f64)
}

/// MSE and MAE of one prediction series.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorPair {
    pub mse: f64,
    pub mae: f64,
}

impl ErrorPair {
    pub fn compute(predicted: &[f64], actual: &[f64]) -> Result<Self, MetricError> {
        Ok(Self { mse: mse(predicted, actual)?, mae: mae(predicted, actual)? })
    }
}
