use proptest::prelude::*;
use webdyn::graph::{decompose, HostGraph};
use webdyn::snapshot::series_stats;
use webdyn::synthgen::{generate, generate_detailed, GenConfig, Sampling};

fn small(seed: u64, years: usize, sites: usize) -> GenConfig {
    GenConfig {
        seed,
        years,
        initial_sites: sites,
        ..GenConfig::default()
    }
}

#[test]
fn same_seed_same_series() {
    let cfg = small(3, 3, 800);
    assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    let other = small(4, 3, 800);
    assert_ne!(generate(&cfg).unwrap(), generate(&other).unwrap());
}

#[test]
fn independent_sampling_also_runs() {
    let cfg = GenConfig {
        sampling: Sampling::Independent,
        ..small(5, 3, 600)
    };
    let g = generate_detailed(&cfg).unwrap();
    assert_eq!(g.series.len(), 3);
}

#[test]
fn config_files_round_trip() {
    let cfg = small(9, 2, 100);
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("gen.json");
    std::fs::write(&json, serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(GenConfig::from_file(&json).unwrap(), cfg);
    let toml_path = dir.path().join("gen.toml");
    std::fs::write(&toml_path, toml::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(GenConfig::from_file(&toml_path).unwrap(), cfg);
    assert!(GenConfig::from_json(r#"{"seeed": 3}"#).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = small(1, 2, 100);
    cfg.pages_theta = 0.9;
    assert!(generate(&cfg).is_err());
    let mut cfg = small(1, 2, 100);
    cfg.one_page_share = 1.5;
    assert!(generate(&cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generated_series_are_consistent(seed in any::<u64>(), sites in 50usize..1500, years in 1usize..4) {
        let cfg = small(seed, years, sites);
        let g = generate_detailed(&cfg).unwrap();
        prop_assert_eq!(g.series.len(), years);
        prop_assert_eq!(g.series.labels(), (0..years as i32).map(|y| 2000 + y).collect::<Vec<_>>());
        let stats = series_stats(&g.series);
        prop_assert_eq!(stats[0].crawled_sites, sites as u64);
        prop_assert_eq!(stats[0].new_sites, sites as u64);
        for (s, &mismatch) in g.series.snapshots().iter().zip(&g.label_mismatches) {
            prop_assert_eq!(mismatch, 0);
            for l in s.links() {
                prop_assert!(l.src != l.dst && l.multiplicity >= 1);
                prop_assert!(s.site(&l.src).unwrap().is_crawled());
                prop_assert!(s.site(&l.dst).unwrap().is_crawled());
            }
            for r in s.crawled() {
                prop_assert!(r.page_count >= 1);
                prop_assert!(r.content_bytes >= 1 << 20);
            }
            let d = decompose(&HostGraph::from_snapshot(s));
            prop_assert_eq!(d.len(), s.crawled().count());
        }
    }
}
