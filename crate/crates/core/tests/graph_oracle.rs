mod common;

use common::{graph, oracle_bowtie, oracle_scc, random_arcs};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use webdyn::graph::{decompose, strongly_connected_components, ComponentLabel, HostGraph};
use webdyn::snapshot::{SiteRecord, Snapshot};

fn sorted_sccs(g: &HostGraph) -> Vec<Vec<usize>> {
    let mut sccs: Vec<Vec<usize>> = strongly_connected_components(g)
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    sccs.sort();
    sccs
}

fn check_against_oracle(n: usize, arcs: &[(usize, usize)]) {
    let g = graph(n, arcs);
    assert_eq!(sorted_sccs(&g), oracle_scc(n, arcs), "arcs {arcs:?}");
    let d = decompose(&g);
    let (labels, sub) = oracle_bowtie(n, arcs);
    assert_eq!(d.labels(), &labels[..], "arcs {arcs:?}");
    assert_eq!(d.main_sub_labels(), &sub[..], "arcs {arcs:?}");
}

#[test]
fn every_graph_on_four_nodes() {
    let pairs: Vec<(usize, usize)> = (0..4)
        .flat_map(|u| (0..4).map(move |v| (u, v)))
        .filter(|(u, v)| u != v)
        .collect();
    for mask in 0u32..1 << pairs.len() {
        let arcs: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        check_against_oracle(4, &arcs);
    }
}

#[test]
fn random_small_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3000 {
        let n = rng.gen_range(1..=8);
        let density = rng.gen_range(0.05..0.5);
        let arcs = random_arcs(&mut rng, n, density);
        check_against_oracle(n, &arcs);
    }
}

#[test]
fn random_medium_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let n = rng.gen_range(10..=60);
        let density = rng.gen_range(0.2..3.0) / n as f64;
        let arcs = random_arcs(&mut rng, n, density);
        check_against_oracle(n, &arcs);
    }
}

#[test]
fn edgeless_graph_is_all_island() {
    let d = decompose(&graph(5, &[]));
    assert!(d.labels().iter().all(|&l| l == ComponentLabel::Island));
    assert!(d.main_sub_labels().iter().all(Option::is_none));
}

#[test]
fn equal_giants_go_to_smaller_hostname() {
    let d = decompose(&graph(4, &[(2, 3), (3, 2), (0, 1), (1, 0)]));
    assert_eq!(
        d.labels(),
        &[
            ComponentLabel::Main,
            ComponentLabel::Main,
            ComponentLabel::Island,
            ComponentLabel::Island
        ]
    );
}

#[test]
fn island_gaining_an_arc_into_main_becomes_in() {
    let base = [(0, 1), (1, 0)];
    assert_eq!(decompose(&graph(3, &base)).labels()[2], ComponentLabel::Island);
    let mut more = base.to_vec();
    more.push((2, 0));
    assert_eq!(decompose(&graph(3, &more)).labels()[2], ComponentLabel::In);
}

#[test]
fn uncrawled_sites_are_not_nodes() {
    let mut records: Vec<SiteRecord> = (0..5).map(|i| SiteRecord::crawled(common::node_name(i), 1, 10)).collect();
    records.push(SiteRecord::not_crawled(common::node_name(5), webdyn::snapshot::SiteStatus::Dead));
    records.push(SiteRecord::not_crawled(common::node_name(6), webdyn::snapshot::SiteStatus::Dead));
    let s = Snapshot::new(2000, records, vec![(common::node_name(0), common::node_name(1), 3)]).unwrap();
    let g = HostGraph::from_snapshot(&s);
    assert_eq!(g.node_count(), 5);
    assert_eq!(g.arc_count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partition_invariants(n in 1usize..40, seed in any::<u64>(), density in 0.0f64..0.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arcs = random_arcs(&mut rng, n, density);
        let g = graph(n, &arcs);
        let d = decompose(&g);
        prop_assert_eq!(d.len(), n);
        let sizes = d.sizes_sites();
        prop_assert_eq!(sizes.values().sum::<u64>(), n as u64);
        let label = d.labels();
        for u in 0..n {
            for &v in g.successors(u) {
                let (a, b) = (label[u], label[v]);
                prop_assert!(!(a == ComponentLabel::Out && b == ComponentLabel::Main));
                prop_assert!(!(a == ComponentLabel::Main && b == ComponentLabel::In));
                prop_assert!(!(a == ComponentLabel::Out && b == ComponentLabel::In));
            }
        }
        for v in 0..n {
            prop_assert_eq!(d.main_sub_labels()[v].is_some(), label[v] == ComponentLabel::Main);
        }
    }

    #[test]
    fn arc_order_does_not_change_labels(n in 2usize..25, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arcs = random_arcs(&mut rng, n, 0.12);
        let d = decompose(&graph(n, &arcs));
        let reversed: Vec<(usize, usize)> = arcs.iter().rev().copied().collect();
        let again = decompose(&graph(n, &reversed));
        prop_assert_eq!(d.labels(), again.labels());
    }
}
