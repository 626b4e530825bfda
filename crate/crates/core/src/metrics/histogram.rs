use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Frequency table: `(value, count)` pairs sorted by value, counts > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    points: Vec<(f64, u64)>,
}

impl Histogram {
    pub fn from_points(mut points: Vec<(f64, u64)>) -> Self {
        points.retain(|&(_, c)| c > 0);
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Histogram { points }
    }

    pub fn points(&self) -> &[(f64, u64)] {
        &self.points
    }

    pub fn frequency(&self, value: f64) -> u64 {
        self.points
            .binary_search_by(|p| p.0.total_cmp(&value))
            .map(|i| self.points[i].1)
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.points.iter().map(|p| p.1).sum()
    }
}

/// Exact frequency of every distinct positive integer value.
pub fn value_histogram(values: &[u64]) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::InsufficientData("histogram of an empty sample".into()));
    }
    if values.contains(&0) {
        return Err(Error::InconsistentInput("histogram values must be positive".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mut points: Vec<(f64, u64)> = Vec::new();
    for v in sorted {
        match points.last_mut() {
            Some(last) if last.0 == v as f64 => last.1 += 1,
            _ => points.push((v as f64, 1)),
        }
    }
    Ok(Histogram { points })
}

/// Counts per logarithmic bin, `bins_per_decade` bins per power of ten.
///
/// Each bin is keyed by its geometric midpoint. Counts are not divided by
/// the bin width, so a density falling as `x^-a` shows up with slope
/// `1 - a` in log-log space.
pub fn geometric_histogram(values: &[f64], bins_per_decade: u32) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::InsufficientData("histogram of an empty sample".into()));
    }
    if bins_per_decade == 0 {
        return Err(Error::Config("bins_per_decade must be positive".into()));
    }
    let b = bins_per_decade as f64;
    let mut counts = std::collections::BTreeMap::<i64, u64>::new();
    for &x in values {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::InconsistentInput(format!(
                "histogram values must be positive and finite, got {x}"
            )));
        }
        let bin = (x.log10() * b).floor() as i64;
        *counts.entry(bin).or_insert(0) += 1;
    }
    let points = counts
        .into_iter()
        .map(|(bin, c)| (10f64.powf((bin as f64 + 0.5) / b), c))
        .collect();
    Ok(Histogram { points })
}

/// Content in whole megabytes (`2^20` bytes), floored, at least 1.
pub fn content_mb_bin(bytes: u64) -> u64 {
    (bytes >> 20).max(1)
}
