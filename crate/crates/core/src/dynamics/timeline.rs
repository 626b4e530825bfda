use std::collections::{BTreeMap, HashSet};

use super::MigrationState;
use crate::graph::Decomposition;
use crate::snapshot::{SiteId, SiteStatus, SnapshotSeries};
use crate::{Error, Result};

/// Per-site `(year, state)` sequence starting at the site's first appearance.
pub type Timelines = BTreeMap<SiteId, Vec<(i32, MigrationState)>>;

/// State of every site in every year from its first appearance on.
///
/// A site missing from a later snapshot is recorded as UNKNOWN for that year.
pub fn component_timeline(series: &SnapshotSeries, decompositions: &[Decomposition]) -> Result<Timelines> {
    if decompositions.len() != series.len() {
        return Err(Error::InconsistentInput(format!(
            "{} decompositions for {} snapshots",
            decompositions.len(),
            series.len()
        )));
    }
    let mut timelines: Timelines = BTreeMap::new();
    for (snapshot, d) in series.snapshots().iter().zip(decompositions) {
        let year = snapshot.label();
        let crawled = snapshot.crawled().count();
        if crawled != d.len() {
            return Err(Error::InconsistentInput(format!(
                "year {year}: {crawled} crawled sites but decomposition covers {}",
                d.len()
            )));
        }
        let mut present: HashSet<&SiteId> = HashSet::with_capacity(snapshot.sites().len());
        for record in snapshot.sites().values() {
            let state = match record.status {
                SiteStatus::Crawled => {
                    let label = d.component_of(&record.id).ok_or_else(|| {
                        Error::InconsistentInput(format!(
                            "year {year}: site {} missing from decomposition",
                            record.id
                        ))
                    })?;
                    MigrationState::from(label)
                }
                SiteStatus::Unknown => MigrationState::Unknown,
                SiteStatus::Dead => MigrationState::Dead,
            };
            present.insert(&record.id);
            timelines.entry(record.id.clone()).or_default().push((year, state));
        }
        for (site, timeline) in timelines.iter_mut() {
            if !present.contains(site) {
                timeline.push((year, MigrationState::Unknown));
            }
        }
    }
    Ok(timelines)
}
