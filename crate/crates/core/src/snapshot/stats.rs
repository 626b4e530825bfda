use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{SiteId, SiteStatus, SnapshotSeries};

/// Collection-level counts for one year of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotStats {
    pub label: i32,
    pub crawled_sites: u64,
    /// Crawled sites that were never crawled in an earlier snapshot.
    pub new_sites: u64,
    pub unknown_sites: u64,
    pub dead_sites: u64,
    pub total_pages: u64,
    pub total_content_bytes: u64,
    pub one_page_sites: u64,
    pub one_page_share: f64,
}

impl SnapshotStats {
    pub fn not_crawled_sites(&self) -> u64 {
        self.unknown_sites + self.dead_sites
    }

    pub fn content_mb(&self) -> f64 {
        bytes_to_mb(self.total_content_bytes)
    }
}

pub fn bytes_to_mb(bytes: u64) -> f64 {
    bytes as f64 / (1u64 << 20) as f64
}

/// Statistics of the snapshot at `index`. Panics if `index` is out of range.
pub fn snapshot_stats(series: &SnapshotSeries, index: usize) -> SnapshotStats {
    let snapshots = series.snapshots();
    let seen: HashSet<&SiteId> = snapshots[..index]
        .iter()
        .flat_map(|s| s.crawled().map(|r| &r.id))
        .collect();
    stats_with_history(series, index, &seen)
}

/// Statistics for every snapshot, sharing the crawl history between years.
pub fn series_stats(series: &SnapshotSeries) -> Vec<SnapshotStats> {
    let mut seen: HashSet<&SiteId> = HashSet::new();
    let mut out = Vec::with_capacity(series.len());
    for (index, snapshot) in series.snapshots().iter().enumerate() {
        out.push(stats_with_history(series, index, &seen));
        seen.extend(snapshot.crawled().map(|r| &r.id));
    }
    out
}

fn stats_with_history(series: &SnapshotSeries, index: usize, seen: &HashSet<&SiteId>) -> SnapshotStats {
    let snapshot = &series.snapshots()[index];
    let mut stats = SnapshotStats {
        label: snapshot.label(),
        crawled_sites: 0,
        new_sites: 0,
        unknown_sites: 0,
        dead_sites: 0,
        total_pages: 0,
        total_content_bytes: 0,
        one_page_sites: 0,
        one_page_share: 0.0,
    };
    for record in snapshot.sites().values() {
        match record.status {
            SiteStatus::Crawled => {
                stats.crawled_sites += 1;
                stats.total_pages += record.page_count;
                stats.total_content_bytes += record.content_bytes;
                if record.page_count == 1 {
                    stats.one_page_sites += 1;
                }
                if !seen.contains(&record.id) {
                    stats.new_sites += 1;
                }
            }
            SiteStatus::Unknown => stats.unknown_sites += 1,
            SiteStatus::Dead => stats.dead_sites += 1,
        }
    }
    if stats.crawled_sites > 0 {
        stats.one_page_share = stats.one_page_sites as f64 / stats.crawled_sites as f64;
    }
    stats
}
