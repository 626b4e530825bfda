//! PageRank over the multiplicity-weighted hostgraph.
//!
//! A walker at `u` follows an arc `u -> v` with probability proportional to
//! its multiplicity; with probability `1 - damping` it jumps to a uniformly
//! random node. Nodes without out-arcs spread their whole score uniformly.
//! The iteration is the plain power method with an L1 stopping rule.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::HostGraph;
use crate::snapshot::{SiteId, Snapshot};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PageRankConfig {
    pub damping: f64,
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            epsilon: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRankResult {
    /// Scores aligned with the graph's node order.
    pub scores: Vec<f64>,
    pub damping: f64,
    pub iterations: usize,
    /// L1 distance between the last two iterates.
    pub residual: f64,
    pub converged: bool,
}

impl PageRankResult {
    pub fn by_site(&self, g: &HostGraph) -> BTreeMap<SiteId, f64> {
        g.nodes().iter().cloned().zip(self.scores.iter().copied()).collect()
    }
}

pub fn pagerank(g: &HostGraph, config: &PageRankConfig) -> Result<PageRankResult> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InsufficientData("PageRank of an empty graph".into()));
    }
    let d = config.damping;
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Config(format!("damping must lie in (0, 1), got {d}")));
    }
    let inv_out: Vec<f64> = (0..n)
        .map(|u| match g.out_weight(u) {
            0 => 0.0,
            w => 1.0 / w as f64,
        })
        .collect();
    let dangling: Vec<usize> = (0..n).filter(|&u| inv_out[u] == 0.0).collect();
    let uniform = 1.0 / n as f64;

    let mut scores = vec![uniform; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < config.max_iter {
        let dangling_mass: f64 = dangling.iter().map(|&u| scores[u]).sum();
        let base = (1.0 - d) * uniform + d * dangling_mass * uniform;
        let mut next: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|v| {
                let pulled: f64 = g
                    .in_arcs(v)
                    .map(|(u, w)| scores[u] * w as f64 * inv_out[u])
                    .sum();
                base + d * pulled
            })
            .collect();
        let total: f64 = next.iter().sum();
        for x in &mut next {
            *x /= total;
        }
        residual = next.iter().zip(&scores).map(|(a, b)| (a - b).abs()).sum();
        scores = next;
        iterations += 1;
        if residual < config.epsilon {
            break;
        }
    }

    Ok(PageRankResult {
        scores,
        damping: d,
        iterations,
        residual,
        converged: residual < config.epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PageRankSource {
    /// Per-site sums read from the sites table, renormalized.
    Recorded,
    /// Hostgraph PageRank standing in for missing page-level sums.
    HostgraphProxy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SitePageRank {
    pub scores: BTreeMap<SiteId, f64>,
    pub source: PageRankSource,
}

/// Sum of PageRank per crawled site.
///
/// Uses the recorded sums when every crawled site carries one, and the
/// hostgraph PageRank when none does. A mix of both is an error.
pub fn sum_pagerank_per_site(
    snapshot: &Snapshot,
    g: &HostGraph,
    config: &PageRankConfig,
) -> Result<SitePageRank> {
    let crawled: Vec<_> = snapshot.crawled().collect();
    let with_sum = crawled.iter().filter(|r| r.pagerank_sum.is_some()).count();
    if with_sum == 0 {
        let result = pagerank(g, config)?;
        return Ok(SitePageRank {
            scores: result.by_site(g),
            source: PageRankSource::HostgraphProxy,
        });
    }
    if with_sum != crawled.len() {
        return Err(Error::InconsistentInput(format!(
            "{with_sum} of {} crawled sites carry a PageRank sum",
            crawled.len()
        )));
    }
    let total: f64 = crawled.iter().filter_map(|r| r.pagerank_sum).sum();
    if total <= 0.0 {
        return Err(Error::InconsistentInput("recorded PageRank sums are all zero".into()));
    }
    Ok(SitePageRank {
        scores: crawled
            .iter()
            .map(|r| (r.id.clone(), r.pagerank_sum.unwrap_or(0.0) / total))
            .collect(),
        source: PageRankSource::Recorded,
    })
}
