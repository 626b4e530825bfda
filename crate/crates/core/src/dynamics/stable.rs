//! Ranking of sites by their average yearly share of a characteristic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graph::HostGraph;
use crate::snapshot::{SiteId, Snapshot, SnapshotSeries};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Characteristic {
    Pages,
    Content,
    InDegree,
    OutDegree,
}

impl Characteristic {
    pub const ALL: [Characteristic; 4] = [
        Characteristic::Pages,
        Characteristic::Content,
        Characteristic::InDegree,
        Characteristic::OutDegree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Characteristic::Pages => "pages",
            Characteristic::Content => "content",
            Characteristic::InDegree => "in_degree",
            Characteristic::OutDegree => "out_degree",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s.trim())
    }

    pub fn needs_links(self) -> bool {
        matches!(self, Characteristic::InDegree | Characteristic::OutDegree)
    }
}

/// Sites missing from at least `max_missing_years` years are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresenceRule {
    pub max_missing_years: usize,
}

impl Default for PresenceRule {
    fn default() -> Self {
        PresenceRule { max_missing_years: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableEntry {
    pub hostname: SiteId,
    pub avg_share: f64,
    pub years_present: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableSiteRanking {
    pub characteristic: Characteristic,
    pub entries: Vec<StableEntry>,
    pub warnings: Vec<String>,
}

impl StableSiteRanking {
    /// TSV `rank hostname avg_share years_present`, ranks starting at 1.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("rank\thostname\tavg_share\tyears_present\n");
        for (i, e) in self.entries.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", i + 1, e.hostname, e.avg_share, e.years_present);
        }
        out
    }
}

/// Raw per-site value of a characteristic in one snapshot (crawled sites).
/// Degrees count distinct neighbouring sites and need the hostgraph.
pub fn site_contributions(
    snapshot: &Snapshot,
    g: Option<&HostGraph>,
    characteristic: Characteristic,
) -> Result<BTreeMap<SiteId, f64>> {
    match characteristic {
        Characteristic::Pages => Ok(snapshot
            .crawled()
            .map(|r| (r.id.clone(), r.page_count as f64))
            .collect()),
        Characteristic::Content => Ok(snapshot
            .crawled()
            .map(|r| (r.id.clone(), r.content_bytes as f64))
            .collect()),
        Characteristic::InDegree | Characteristic::OutDegree => {
            let g = g.ok_or_else(|| {
                Error::InconsistentInput("degree contributions need the hostgraph".into())
            })?;
            Ok((0..g.node_count())
                .map(|v| {
                    let deg = if characteristic == Characteristic::InDegree {
                        g.in_degree(v)
                    } else {
                        g.out_degree(v)
                    };
                    (g.node(v).clone(), deg as f64)
                })
                .collect())
        }
    }
}

/// Ranks sites by their share of each year's total, averaged over the
/// series. A year where a site has no value counts as a zero share. Years
/// whose total is zero are skipped with a warning.
pub fn stable_sites(
    series: &SnapshotSeries,
    contributions: &BTreeMap<i32, BTreeMap<SiteId, f64>>,
    characteristic: Characteristic,
    k: usize,
    rule: PresenceRule,
) -> Result<StableSiteRanking> {
    if contributions.is_empty() {
        return Err(Error::InsufficientData("no yearly contributions given".into()));
    }
    let labels: BTreeSet<i32> = series.labels().into_iter().collect();
    if let Some(year) = contributions.keys().find(|y| !labels.contains(y)) {
        return Err(Error::InconsistentInput(format!(
            "contributions for year {year}, which is not in the series"
        )));
    }

    let mut warnings = Vec::new();
    let mut share_sum: BTreeMap<&SiteId, f64> = BTreeMap::new();
    let mut years_used = 0usize;
    for (year, values) in contributions {
        if let Some((site, bad)) = values.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InconsistentInput(format!(
                "year {year}: site {site} has contribution {bad}"
            )));
        }
        let total: f64 = values.values().sum();
        if total <= 0.0 {
            warnings.push(format!(
                "year {year}: {} total is zero, year skipped",
                characteristic.as_str()
            ));
            continue;
        }
        years_used += 1;
        for (site, v) in values {
            *share_sum.entry(site).or_insert(0.0) += v / total;
        }
    }
    if years_used == 0 {
        return Err(Error::InsufficientData(format!(
            "every year has a zero {} total",
            characteristic.as_str()
        )));
    }

    let mut crawled_years: HashMap<&SiteId, usize> = HashMap::new();
    for snapshot in series.snapshots() {
        for r in snapshot.crawled() {
            *crawled_years.entry(&r.id).or_insert(0) += 1;
        }
    }
    let series_len = series.len();
    let mut entries: Vec<StableEntry> = share_sum
        .into_iter()
        .filter_map(|(site, sum)| {
            let years_present = crawled_years.get(site).copied().unwrap_or(0);
            let missing = series_len - years_present.min(series_len);
            (missing < rule.max_missing_years).then(|| StableEntry {
                hostname: site.clone(),
                avg_share: sum / years_used as f64,
                years_present,
            })
        })
        .collect();
    entries.sort_by(|a, b| {
        b.avg_share
            .total_cmp(&a.avg_share)
            .then_with(|| a.hostname.cmp(&b.hostname))
    });
    entries.truncate(k);
    Ok(StableSiteRanking {
        characteristic,
        entries,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::SiteRecord;

    fn id(s: &str) -> SiteId {
        SiteId::parse(s).unwrap()
    }

    /// Eight years; `steady` holds 10% every year, `flash` dominates one year
    /// only, `part` is crawled in four years.
    fn fixture() -> (SnapshotSeries, BTreeMap<i32, BTreeMap<SiteId, f64>>) {
        let mut snapshots = Vec::new();
        let mut contrib = BTreeMap::new();
        for y in 0..8 {
            let year = 2000 + y;
            let mut records = vec![SiteRecord::crawled(id("steady"), 10, 1)];
            let mut values = BTreeMap::from([(id("steady"), 10.0)]);
            for j in 0..9 {
                let host = id(&format!("small{j}"));
                records.push(SiteRecord::crawled(host.clone(), 9, 1));
                values.insert(host, 9.0);
            }
            if y == 3 {
                records.push(SiteRecord::crawled(id("flash"), 500, 1));
                values.insert(id("flash"), 500.0);
            }
            if y < 4 {
                records.push(SiteRecord::crawled(id("part"), 30, 1));
                values.insert(id("part"), 30.0);
            }
            snapshots.push(Snapshot::new(year, records, vec![]).unwrap());
            contrib.insert(year, values);
        }
        (SnapshotSeries::new(snapshots).unwrap(), contrib)
    }

    #[test]
    fn steady_site_ranks_first() {
        let (series, contrib) = fixture();
        let r = stable_sites(&series, &contrib, Characteristic::Pages, 3, PresenceRule::default())
            .unwrap();
        assert_eq!(r.entries[0].hostname, id("steady"));
        assert_eq!(r.entries[0].years_present, 8);
        assert!(r.entries.windows(2).all(|w| w[0].avg_share >= w[1].avg_share));
    }

    #[test]
    fn sites_missing_three_years_are_dropped() {
        let (series, contrib) = fixture();
        let r = stable_sites(&series, &contrib, Characteristic::Pages, 100, PresenceRule::default())
            .unwrap();
        assert!(r.entries.iter().all(|e| e.hostname != id("part")));
        assert!(r.entries.iter().all(|e| e.hostname != id("flash")));
        let lenient = PresenceRule { max_missing_years: 8 };
        let r = stable_sites(&series, &contrib, Characteristic::Pages, 100, lenient).unwrap();
        assert!(r.entries.iter().any(|e| e.hostname == id("part")));
    }

    #[test]
    fn zero_total_year_is_skipped_with_warning() {
        let (series, mut contrib) = fixture();
        for v in contrib.get_mut(&2001).unwrap().values_mut() {
            *v = 0.0;
        }
        let r = stable_sites(&series, &contrib, Characteristic::Pages, 1, PresenceRule::default())
            .unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.entries[0].hostname, id("steady"));
    }

    #[test]
    fn unknown_year_is_rejected() {
        let (series, mut contrib) = fixture();
        contrib.insert(1990, BTreeMap::new());
        assert!(stable_sites(&series, &contrib, Characteristic::Pages, 1, PresenceRule::default())
            .is_err());
    }

    #[test]
    fn degree_contributions_need_graph() {
        let (series, _) = fixture();
        let snap = &series.snapshots()[0];
        assert!(site_contributions(snap, None, Characteristic::InDegree).is_err());
        let pages = site_contributions(snap, None, Characteristic::Pages).unwrap();
        assert_eq!(pages[&id("steady")], 10.0);
    }
}
