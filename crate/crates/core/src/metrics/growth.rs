use serde::{Deserialize, Serialize};

use super::ols;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthMethod {
    /// Least squares on `(index, ln value)`; factor is `exp(slope)`.
    #[default]
    LogLinear,
    /// Least squares of `value[n]` on `value[n-1]` through the origin.
    RatioThroughOrigin,
}

/// Per-step multiplier of `f[n] = factor * f[n-1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub factor: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    pub method: GrowthMethod,
}

pub fn fit_growth(series: &[f64]) -> Result<GrowthFit> {
    fit_growth_with(series, GrowthMethod::LogLinear)
}

pub fn fit_growth_with(series: &[f64], method: GrowthMethod) -> Result<GrowthFit> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(
            "growth fit needs at least two values".into(),
        ));
    }
    if let Some(bad) = series.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidSeries(format!(
            "growth series values must be positive, got {bad}"
        )));
    }
    match method {
        GrowthMethod::LogLinear => {
            let points: Vec<(f64, f64)> = series
                .iter()
                .enumerate()
                .map(|(i, v)| (i as f64, v.ln()))
                .collect();
            let (slope, intercept, r_squared) = ols(&points).expect("indices are distinct");
            Ok(GrowthFit {
                factor: slope.exp(),
                log_intercept: intercept,
                r_squared,
                method,
            })
        }
        GrowthMethod::RatioThroughOrigin => {
            let pairs = series.windows(2).map(|w| (w[0], w[1]));
            let (sxy, sxx) = pairs
                .clone()
                .fold((0.0, 0.0), |(sxy, sxx), (x, y)| (sxy + x * y, sxx + x * x));
            let factor = sxy / sxx;
            let ys: Vec<f64> = series[1..].to_vec();
            let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
            let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
            let ss_res: f64 = pairs.map(|(x, y)| (y - factor * x).powi(2)).sum();
            let r_squared = if ss_tot > 0.0 {
                (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
            } else {
                1.0
            };
            Ok(GrowthFit {
                factor,
                log_intercept: series[0].ln(),
                r_squared,
                method,
            })
        }
    }
}
