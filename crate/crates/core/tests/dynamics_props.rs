use std::collections::BTreeMap;

use proptest::prelude::*;
use webdyn::dynamics::{
    component_timeline, migration_counts, site_contributions, stable_sites, top_migrations, Characteristic,
    Denominator, MigrationState, PresenceRule,
};
use webdyn::graph::{decompose, Decomposition, HostGraph};
use webdyn::snapshot::{SiteId, SiteRecord, SiteStatus, Snapshot, SnapshotSeries};

fn id(i: usize) -> SiteId {
    SiteId::parse(&format!("h{i:03}.cl")).unwrap()
}

fn decompositions(series: &SnapshotSeries) -> Vec<Decomposition> {
    series
        .snapshots()
        .iter()
        .map(|s| decompose(&HostGraph::from_snapshot(s)))
        .collect()
}

/// Year 1: h000 <-> h001 form MAIN, h002 -> h000 is IN, h003 is ISLAND.
/// Year 2: h000 <-> h001 stay MAIN, h002 is dead, h003 -> h000 is IN,
/// h004 appears as an ISLAND. Year 3: only h004 is listed, as unknown.
fn small_series() -> SnapshotSeries {
    let c = |i| SiteRecord::crawled(id(i), 2, 100);
    let y1 = Snapshot::new(
        2001,
        (0..4).map(c),
        vec![(id(0), id(1), 1), (id(1), id(0), 1), (id(2), id(0), 1)],
    )
    .unwrap();
    let y2 = Snapshot::new(
        2002,
        vec![c(0), c(1), SiteRecord::not_crawled(id(2), SiteStatus::Dead), c(3), c(4)],
        vec![(id(0), id(1), 1), (id(1), id(0), 1), (id(3), id(0), 1)],
    )
    .unwrap();
    let y3 = Snapshot::new(2003, vec![SiteRecord::not_crawled(id(4), SiteStatus::Unknown)], vec![]).unwrap();
    SnapshotSeries::new(vec![y1, y2, y3]).unwrap()
}

#[test]
fn hand_counted_migrations() {
    use MigrationState::*;
    let series = small_series();
    let t = component_timeline(&series, &decompositions(&series)).unwrap();
    assert_eq!(t[&id(2)], vec![(2001, In), (2002, Dead), (2003, Unknown)]);
    assert_eq!(t[&id(3)], vec![(2001, Island), (2002, In), (2003, Unknown)]);
    assert_eq!(t[&id(4)], vec![(2002, Island), (2003, Unknown)]);

    let m = migration_counts(&t);
    let expected = [
        (New, Main, 2),
        (New, In, 1),
        (New, Island, 2),
        (Main, Main, 2),
        (Main, Unknown, 2),
        (In, Dead, 1),
        (Dead, Unknown, 1),
        (Island, In, 1),
        (In, Unknown, 1),
        (Island, Unknown, 1),
    ];
    let mut total = 0;
    for (a, b, n) in expected {
        assert_eq!(m.count(a, b), n, "{a} -> {b}");
        total += n;
    }
    assert_eq!(m.total(), total);

    let top = top_migrations(&m, 3, Denominator::AllTransitions).unwrap();
    assert_eq!((top[0].from, top[0].to, top[0].count), (Main, Unknown, 2));
    assert!((top[0].percent - 200.0 / total as f64).abs() < 1e-12);
    assert_eq!((top[1].from, top[1].to), (New, Island));
}

#[test]
fn row_percentages_sum_to_hundred() {
    let series = small_series();
    let m = migration_counts(&component_timeline(&series, &decompositions(&series)).unwrap());
    for from in MigrationState::ALL {
        let row = m.row_percent(from);
        let sum: f64 = row.iter().sum();
        if m.row_total(from) > 0 {
            assert!((sum - 100.0).abs() < 1e-9, "{from}: {sum}");
        } else {
            assert_eq!(sum, 0.0);
        }
    }
}

fn contributions(
    series: &SnapshotSeries,
    characteristic: Characteristic,
) -> BTreeMap<i32, BTreeMap<SiteId, f64>> {
    series
        .snapshots()
        .iter()
        .map(|s| {
            let g = HostGraph::from_snapshot(s);
            (s.label(), site_contributions(s, Some(&g), characteristic).unwrap())
        })
        .collect()
}

#[test]
fn absent_sites_are_dropped_by_presence_rule() {
    let c = |i, pages| SiteRecord::crawled(id(i), pages, pages);
    let years: Vec<Snapshot> = (0..5)
        .map(|y| {
            let mut sites = vec![c(0, 10), c(1, 20)];
            if y == 0 {
                sites.push(c(2, 10_000));
            }
            Snapshot::new(2000 + y, sites, vec![]).unwrap()
        })
        .collect();
    let series = SnapshotSeries::new(years).unwrap();
    let contrib = contributions(&series, Characteristic::Pages);
    let ranking = stable_sites(&series, &contrib, Characteristic::Pages, 10, PresenceRule::default()).unwrap();
    let hosts: Vec<&SiteId> = ranking.entries.iter().map(|e| &e.hostname).collect();
    assert_eq!(hosts, vec![&id(1), &id(0)]);
    let lenient = stable_sites(&series, &contrib, Characteristic::Pages, 10, PresenceRule { max_missing_years: 5 }).unwrap();
    assert_eq!(lenient.entries.len(), 3);
    assert_eq!(lenient.entries[2].hostname, id(2));
    assert_eq!(lenient.entries[2].years_present, 1);
}

proptest! {
    #[test]
    fn transitions_account_for_every_site_year(
        present in prop::collection::vec(prop::collection::vec(0u8..4, 12), 2..6),
        arcs in prop::collection::vec((0usize..12, 0usize..12), 0..40),
    ) {
        // 0 absent, 1 crawled, 2 unknown, 3 dead
        let snapshots: Vec<Snapshot> = present
            .iter()
            .enumerate()
            .map(|(y, row)| {
                let records: Vec<SiteRecord> = row
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &s)| match s {
                        1 => Some(SiteRecord::crawled(id(i), 1, 1)),
                        2 => Some(SiteRecord::not_crawled(id(i), SiteStatus::Unknown)),
                        3 => Some(SiteRecord::not_crawled(id(i), SiteStatus::Dead)),
                        _ => None,
                    })
                    .collect();
                let links: Vec<_> = arcs
                    .iter()
                    .filter(|&&(u, v)| u != v && row[u] == 1 && row[v] == 1)
                    .map(|&(u, v)| (id(u), id(v), 1))
                    .collect();
                Snapshot::new(2000 + y as i32, records, links).unwrap()
            })
            .collect();
        let years = snapshots.len();
        let series = SnapshotSeries::new(snapshots).unwrap();
        let t = component_timeline(&series, &decompositions(&series)).unwrap();
        let m = migration_counts(&t);

        let mut expected_total = 0u64;
        let mut first_seen = 0u64;
        for i in 0..12 {
            if let Some(first) = present.iter().position(|row| row[i] != 0) {
                first_seen += 1;
                expected_total += (years - first) as u64;
            }
        }
        prop_assert_eq!(m.row_total(MigrationState::New), first_seen);
        prop_assert_eq!(m.total(), expected_total);
        for to in MigrationState::ALL {
            prop_assert_eq!(m.count(to, MigrationState::New), 0);
        }
    }

    #[test]
    fn ranking_ignores_yearly_scale(
        values in prop::collection::vec(prop::collection::vec(1u64..1000, 20), 2..6),
        exponents in prop::collection::vec(0u32..20, 6),
    ) {
        let build = |scale: &dyn Fn(usize) -> u64| {
            let snapshots = values
                .iter()
                .enumerate()
                .map(|(y, row)| {
                    let records = row.iter().enumerate().map(|(i, &v)| SiteRecord::crawled(id(i), v * scale(y), v));
                    Snapshot::new(2000 + y as i32, records, vec![]).unwrap()
                })
                .collect();
            SnapshotSeries::new(snapshots).unwrap()
        };
        let plain = build(&|_| 1);
        let scaled = build(&|y| 1u64 << exponents[y]);
        let rank = |s: &SnapshotSeries| {
            stable_sites(s, &contributions(s, Characteristic::Pages), Characteristic::Pages, 20, PresenceRule::default())
                .unwrap()
        };
        prop_assert_eq!(rank(&plain), rank(&scaled));
    }
}
