use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Cumulative share of a characteristic held by the top fraction of sites.
///
/// Point `i` (1-based) is `(i / N, sum of the i largest values / total)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccumulationCurve {
    pub points: Vec<(f64, f64)>,
}

pub fn accumulation_curve(values: &[f64]) -> Result<AccumulationCurve> {
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InconsistentInput(format!(
            "accumulation values must be non-negative and finite, got {bad}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sorted.iter().sum();
    if total <= 0.0 {
        return Err(Error::InsufficientData(
            "accumulation curve of an all-zero sample".into(),
        ));
    }
    let n = sorted.len() as f64;
    let mut acc = 0.0;
    let mut points: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| {
            acc += v;
            ((i + 1) as f64 / n, (acc / total).min(1.0))
        })
        .collect();
    if let Some(last) = points.last_mut() {
        *last = (1.0, 1.0);
    }
    Ok(AccumulationCurve { points })
}

impl AccumulationCurve {
    /// Share of the total held by the top `site_fraction` of sites, linearly
    /// interpolated between points (the curve starts at the origin).
    pub fn share_at(&self, site_fraction: f64) -> f64 {
        let f = site_fraction.clamp(0.0, 1.0);
        let mut prev = (0.0, 0.0);
        for &(x, y) in &self.points {
            if f <= x {
                if x == prev.0 {
                    return y;
                }
                return prev.1 + (y - prev.1) * (f - prev.0) / (x - prev.0);
            }
            prev = (x, y);
        }
        1.0
    }

    /// The curve evaluated on a fixed grid, for compact reports.
    pub fn resample(&self, fractions: &[f64]) -> Vec<(f64, f64)> {
        fractions.iter().map(|&f| (f, self.share_at(f))).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("site_fraction,value_fraction\n");
        for (x, y) in &self.points {
            let _ = writeln!(out, "{x},{y}");
        }
        out
    }
}
