//! Distribution fitting and graph metrics.

mod curve;
mod growth;
mod histogram;
mod pagerank;
mod powerlaw;

pub use curve::{accumulation_curve, AccumulationCurve};
pub use growth::{fit_growth, fit_growth_with, GrowthFit, GrowthMethod};
pub use histogram::{content_mb_bin, geometric_histogram, value_histogram, Histogram};
pub use pagerank::{
    pagerank, sum_pagerank_per_site, PageRankConfig, PageRankResult, PageRankSource, SitePageRank,
};
pub use powerlaw::{fit_powerlaw, FitRange, PowerLawFit};

/// Ordinary least squares `y = intercept + slope * x`. Returns
/// `(slope, intercept, r_squared)`, or `None` when all `x` coincide.
pub(crate) fn ols(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Some((slope, intercept, r_squared))
}
