use serde::{Deserialize, Serialize};

use super::{ols, Histogram};
use crate::{Error, Result};

/// Inclusive value range a fit is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRange {
    pub min: f64,
    pub max: f64,
}

impl FitRange {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min > 0.0 && min <= max) {
            return Err(Error::Config(format!("invalid fit range [{min}, {max}]")));
        }
        Ok(FitRange { min, max })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

/// `freq(x) ~ k / x^theta` fitted in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub theta: f64,
    pub log_k: f64,
    #[serde(rename = "range")]
    pub fit_range: FitRange,
    #[serde(rename = "r2")]
    pub r_squared: f64,
    pub points_used: usize,
}

/// Least squares on `(ln x, ln freq)` for the histogram points inside
/// `range`. `theta` is the negated slope, `log_k` the intercept.
pub fn fit_powerlaw(hist: &Histogram, range: FitRange) -> Result<PowerLawFit> {
    let points: Vec<(f64, f64)> = hist
        .points()
        .iter()
        .filter(|&&(x, f)| f > 0 && range.contains(x))
        .map(|&(x, f)| (x.ln(), (f as f64).ln()))
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs at least 2 populated values in [{}, {}], found {}",
            range.min,
            range.max,
            points.len()
        )));
    }
    let (slope, intercept, r_squared) =
        ols(&points).ok_or_else(|| Error::InsufficientData("degenerate fit points".into()))?;
    Ok(PowerLawFit {
        theta: -slope,
        log_k: intercept,
        fit_range: range,
        r_squared,
        points_used: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(a: f64, b: f64) -> FitRange {
        FitRange::new(a, b).unwrap()
    }

    #[test]
    fn two_point_line() {
        let h = Histogram::from_points(vec![(1.0, 1000), (10.0, 10)]);
        let fit = fit_powerlaw(&h, range(1.0, 10.0)).unwrap();
        assert!((fit.theta - 2.0).abs() < 1e-12);
        assert!((fit.log_k - 1000f64.ln()).abs() < 1e-12);
        assert_eq!(fit.points_used, 2);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn rounded_inverse_square() {
        let h = Histogram::from_points(
            (1..=100u64)
                .map(|x| (x as f64, (1e6 / (x * x) as f64).round() as u64))
                .collect(),
        );
        let fit = fit_powerlaw(&h, range(1.0, 100.0)).unwrap();
        assert!((fit.theta - 2.0).abs() < 0.02, "theta {}", fit.theta);
    }

    #[test]
    fn range_filters_points() {
        let h = Histogram::from_points(vec![(1.0, 1000), (10.0, 10), (1000.0, 500)]);
        let fit = fit_powerlaw(&h, range(1.0, 100.0)).unwrap();
        assert_eq!(fit.points_used, 2);
        assert!(fit_powerlaw(&h, range(5.0, 50.0)).is_err());
    }

    #[test]
    fn invalid_range_rejected() {
        assert!(FitRange::new(0.0, 1.0).is_err());
        assert!(FitRange::new(5.0, 1.0).is_err());
    }
}
