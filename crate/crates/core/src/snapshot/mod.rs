//! Snapshot data model: sites, site links, yearly snapshots and series.

mod io;
mod stats;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use io::{
    list_year_dirs, load_series, parse_links, parse_sites, parse_snapshot, read_snapshot_dir,
    write_links, write_series, write_sites, write_snapshot_dir, LINKS_FILE, SITES_FILE,
};
pub use stats::{bytes_to_mb, series_stats, snapshot_stats, SnapshotStats};

/// Normalized hostname identifying a site across snapshots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SiteId(String);

impl SiteId {
    /// Normalizes a raw hostname or URL into a site id.
    ///
    /// Strips the scheme, user info, path, query, port and a trailing dot,
    /// then lowercases. Anything left that is empty or contains whitespace or
    /// a slash is rejected.
    pub fn parse(raw: &str) -> Result<Self> {
        normalize_hostname(raw)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for SiteId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        normalize_hostname(&value)
    }
}

impl From<SiteId> for String {
    fn from(id: SiteId) -> String {
        id.0
    }
}

impl AsRef<str> for SiteId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn normalize_hostname(raw: &str) -> Result<SiteId> {
    let malformed = || Error::MalformedHostname(raw.to_string());
    let mut host = raw.trim();
    if let Some(pos) = host.find("://") {
        host = &host[pos + 3..];
    }
    if let Some(end) = host.find(['/', '?', '#']) {
        host = &host[..end];
    }
    if let Some(at) = host.rfind('@') {
        host = &host[at + 1..];
    }
    if let Some(colon) = host.rfind(':') {
        let port = &host[colon + 1..];
        if port.chars().all(|c| c.is_ascii_digit()) {
            host = &host[..colon];
        }
    }
    let host = host.strip_suffix('.').unwrap_or(host);
    if host.is_empty() || host.chars().any(|c| c.is_whitespace() || c == '/') {
        return Err(malformed());
    }
    Ok(SiteId(host.to_lowercase()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteStatus {
    Crawled,
    Unknown,
    Dead,
}

impl SiteStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SiteStatus::Crawled => "crawled",
            SiteStatus::Unknown => "unknown",
            SiteStatus::Dead => "dead",
        }
    }
}

impl std::str::FromStr for SiteStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "crawled" => Ok(SiteStatus::Crawled),
            "unknown" => Ok(SiteStatus::Unknown),
            "dead" => Ok(SiteStatus::Dead),
            other => Err(format!("unknown site status {other:?}")),
        }
    }
}

/// One site in one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteRecord {
    pub id: SiteId,
    pub status: SiteStatus,
    pub page_count: u64,
    pub content_bytes: u64,
    pub pagerank_sum: Option<f64>,
}

impl SiteRecord {
    pub fn crawled(id: SiteId, page_count: u64, content_bytes: u64) -> Self {
        SiteRecord {
            id,
            status: SiteStatus::Crawled,
            page_count,
            content_bytes,
            pagerank_sum: None,
        }
    }

    pub fn not_crawled(id: SiteId, status: SiteStatus) -> Self {
        SiteRecord {
            id,
            status,
            page_count: 0,
            content_bytes: 0,
            pagerank_sum: None,
        }
    }

    pub fn is_crawled(&self) -> bool {
        self.status == SiteStatus::Crawled
    }

    pub fn validate(&self) -> Result<()> {
        let violation = |message: &str| {
            Err(Error::InvariantViolation {
                site: self.id.to_string(),
                message: message.to_string(),
            })
        };
        match self.status {
            SiteStatus::Crawled => {
                if self.page_count == 0 {
                    return violation("crawled site must have at least one page");
                }
            }
            SiteStatus::Unknown | SiteStatus::Dead => {
                if self.page_count != 0 || self.content_bytes != 0 {
                    return violation("site that was not crawled cannot have pages or content");
                }
                if self.pagerank_sum.is_some() {
                    return violation("site that was not crawled cannot carry a PageRank sum");
                }
            }
        }
        if let Some(pr) = self.pagerank_sum {
            if !(pr.is_finite() && pr >= 0.0) {
                return violation("PageRank sum must be a non-negative number");
            }
        }
        Ok(())
    }
}

/// Aggregated page-level links from one site to another.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HostLink {
    pub src: SiteId,
    pub dst: SiteId,
    pub multiplicity: u64,
}

/// One crawl year.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    label: i32,
    sites: BTreeMap<SiteId, SiteRecord>,
    links: Vec<HostLink>,
    dropped_self_links: u64,
}

impl Snapshot {
    /// Builds a validated snapshot.
    ///
    /// Link rows for the same ordered pair are merged by summing their
    /// multiplicities; self-links are dropped and counted.
    pub fn new(
        label: i32,
        records: impl IntoIterator<Item = SiteRecord>,
        raw_links: impl IntoIterator<Item = (SiteId, SiteId, u64)>,
    ) -> Result<Self> {
        let sites = collect_sites(records)?;
        let (links, dropped_self_links) = merge_links(&sites, raw_links)?;
        Ok(Snapshot {
            label,
            sites,
            links,
            dropped_self_links,
        })
    }

    pub(crate) fn from_parts(
        label: i32,
        sites: BTreeMap<SiteId, SiteRecord>,
        links: Vec<HostLink>,
        dropped_self_links: u64,
    ) -> Self {
        Snapshot {
            label,
            sites,
            links,
            dropped_self_links,
        }
    }

    pub fn label(&self) -> i32 {
        self.label
    }

    pub fn sites(&self) -> &BTreeMap<SiteId, SiteRecord> {
        &self.sites
    }

    pub fn site(&self, id: &SiteId) -> Option<&SiteRecord> {
        self.sites.get(id)
    }

    /// Links sorted by `(src, dst)`.
    pub fn links(&self) -> &[HostLink] {
        &self.links
    }

    pub fn dropped_self_links(&self) -> u64 {
        self.dropped_self_links
    }

    pub fn crawled(&self) -> impl Iterator<Item = &SiteRecord> {
        self.sites.values().filter(|r| r.is_crawled())
    }

    /// Same sites, links replaced by nothing. Used when the link table of a
    /// year cannot be read but per-site statistics are still wanted.
    pub fn without_links(&self) -> Snapshot {
        Snapshot {
            label: self.label,
            sites: self.sites.clone(),
            links: Vec::new(),
            dropped_self_links: 0,
        }
    }
}

pub(crate) fn collect_sites(
    records: impl IntoIterator<Item = SiteRecord>,
) -> Result<BTreeMap<SiteId, SiteRecord>> {
    let mut sites = BTreeMap::new();
    for record in records {
        record.validate()?;
        let id = record.id.clone();
        if sites.insert(id.clone(), record).is_some() {
            return Err(Error::InvariantViolation {
                site: id.to_string(),
                message: "duplicate site in snapshot".to_string(),
            });
        }
    }
    Ok(sites)
}

pub(crate) fn merge_links(
    sites: &BTreeMap<SiteId, SiteRecord>,
    raw_links: impl IntoIterator<Item = (SiteId, SiteId, u64)>,
) -> Result<(Vec<HostLink>, u64)> {
    let mut merged: BTreeMap<(SiteId, SiteId), u64> = BTreeMap::new();
    let mut dropped = 0u64;
    for (src, dst, multiplicity) in raw_links {
        for end in [&src, &dst] {
            if !sites.get(end).is_some_and(SiteRecord::is_crawled) {
                return Err(Error::ReferentialIntegrity {
                    src: src.to_string(),
                    dst: dst.to_string(),
                    missing: end.to_string(),
                });
            }
        }
        if multiplicity == 0 {
            return Err(Error::InvariantViolation {
                site: src.to_string(),
                message: format!("link to {dst} has zero multiplicity"),
            });
        }
        if src == dst {
            dropped += 1;
            continue;
        }
        *merged.entry((src, dst)).or_insert(0) += multiplicity;
    }
    let links = merged
        .into_iter()
        .map(|((src, dst), multiplicity)| HostLink {
            src,
            dst,
            multiplicity,
        })
        .collect();
    Ok((links, dropped))
}

/// Snapshots ordered by strictly increasing year label.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    snapshots: Vec<Snapshot>,
}

impl SnapshotSeries {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InvalidSeries("a series needs at least one snapshot".into()));
        }
        for pair in snapshots.windows(2) {
            if pair[0].label >= pair[1].label {
                return Err(Error::InvalidSeries(format!(
                    "labels must be strictly increasing ({} then {})",
                    pair[0].label, pair[1].label
                )));
            }
        }
        Ok(SnapshotSeries { snapshots })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn get(&self, index: usize) -> Option<&Snapshot> {
        self.snapshots.get(index)
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn labels(&self) -> Vec<i32> {
        self.snapshots.iter().map(Snapshot::label).collect()
    }

    pub fn into_snapshots(self) -> Vec<Snapshot> {
        self.snapshots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> SiteId {
        SiteId::parse(s).unwrap()
    }

    #[test]
    fn hostname_case_is_folded() {
        assert_eq!(id("WWW.UCHILE.CL").as_str(), "www.uchile.cl");
    }

    #[test]
    fn hostname_scheme_and_path_are_stripped() {
        assert_eq!(id("http://www.nic.cl/index.html").as_str(), "www.nic.cl");
        assert_eq!(id("https://user@Example.cl:8080/a?b#c").as_str(), "example.cl");
        assert_eq!(id("www.cwr.cl.").as_str(), "www.cwr.cl");
    }

    #[test]
    fn blank_hostname_is_rejected() {
        assert!(matches!(
            SiteId::parse("   "),
            Err(Error::MalformedHostname(_))
        ));
        assert!(SiteId::parse("http:///path").is_err());
        assert!(SiteId::parse("two words.cl").is_err());
    }

    #[test]
    fn duplicate_links_are_merged() {
        let sites = ["a", "b", "c"].map(|h| SiteRecord::crawled(id(h), 1, 10));
        let snap = Snapshot::new(
            2000,
            sites,
            [(id("a"), id("b"), 1), (id("a"), id("b"), 1), (id("c"), id("c"), 4)],
        )
        .unwrap();
        assert_eq!(snap.links().len(), 1);
        assert_eq!(snap.links()[0].multiplicity, 2);
        assert_eq!(snap.dropped_self_links(), 1);
    }

    #[test]
    fn link_to_dead_site_is_rejected() {
        let sites = vec![
            SiteRecord::crawled(id("a"), 1, 10),
            SiteRecord::not_crawled(id("b"), SiteStatus::Dead),
        ];
        let err = Snapshot::new(2000, sites, [(id("a"), id("b"), 1)]).unwrap_err();
        assert!(matches!(err, Error::ReferentialIntegrity { ref missing, .. } if missing == "b"));
    }

    #[test]
    fn record_invariants() {
        let mut dead = SiteRecord::not_crawled(id("x"), SiteStatus::Dead);
        dead.page_count = 5;
        assert!(dead.validate().is_err());
        let crawled_empty = SiteRecord::crawled(id("y"), 0, 0);
        assert!(crawled_empty.validate().is_err());
        let mut unknown = SiteRecord::not_crawled(id("z"), SiteStatus::Unknown);
        unknown.pagerank_sum = Some(0.1);
        assert!(unknown.validate().is_err());
    }

    #[test]
    fn series_labels_must_increase() {
        let s = |y| Snapshot::new(y, Vec::new(), Vec::new()).unwrap();
        assert!(SnapshotSeries::new(vec![s(2001), s(2001)]).is_err());
        assert!(SnapshotSeries::new(vec![]).is_err());
        assert_eq!(
            SnapshotSeries::new(vec![s(2000), s(2003)]).unwrap().labels(),
            vec![2000, 2003]
        );
    }
}
