//! Synthetic crawl series with prescribed distributions and component
//! transitions.
//!
//! Every site draws its page count, content size, out-degree target and
//! in-degree target once, at birth. Each year, sites move between states in the
//! proportions of the configured transition table, new sites arrive so that
//! the crawled population grows by `site_growth_factor`, and the crawled
//! sites are wired so that each lands in its assigned bow-tie component.

mod apportion;
mod sampler;
mod wiring;

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{MigrationState, STATE_COUNT};
use crate::graph::{decompose_bowtie, HostGraph};
use crate::snapshot::{SiteId, SiteRecord, SiteStatus, Snapshot, SnapshotSeries};
use crate::{Error, Result};

use apportion::{largest_remainder, Apportioner};
pub use sampler::{uniforms, DiscretePowerLaw, Sampling};
use wiring::{wire, WireNode};

/// Destination columns of a transition row: every state but NEW.
pub const DESTINATIONS: usize = STATE_COUNT - 1;

const MB: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub years: usize,
    pub first_year: i32,
    /// Crawled sites in the first year.
    pub initial_sites: usize,
    /// Year-over-year growth of the crawled population.
    pub site_growth_factor: f64,
    pub pages_theta: f64,
    pub content_theta: f64,
    pub indeg_theta: f64,
    pub outdeg_theta: f64,
    pub multiplicity_theta: f64,
    /// Share of sites holding a single page.
    pub one_page_share: f64,
    /// Upper end of the page-count and degree distributions.
    pub max_value: u64,
    /// Upper end of the content distribution, in MB.
    pub content_max_mb: u64,
    pub max_multiplicity: u64,
    /// Percent of sites moving from each state to MAIN..DEAD, in that
    /// order. Rows need not sum to exactly 100; they are normalized.
    pub transitions: BTreeMap<MigrationState, [f64; DESTINATIONS]>,
    pub sampling: Sampling,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 1,
            years: 8,
            first_year: 2000,
            initial_sites: 10_000,
            site_growth_factor: 1.32,
            pages_theta: 1.83,
            content_theta: 1.81,
            indeg_theta: 1.83,
            outdeg_theta: 1.84,
            multiplicity_theta: 2.0,
            one_page_share: 0.4329,
            max_value: 100_000,
            content_max_mb: 2_000_000,
            max_multiplicity: 1_000,
            transitions: default_transitions(),
            sampling: Sampling::Stratified,
        }
    }
}

/// Default transition table, in percent.
pub fn default_transitions() -> BTreeMap<MigrationState, [f64; DESTINATIONS]> {
    use MigrationState::*;
    BTreeMap::from([
        (Main, [43.44, 16.58, 6.81, 4.64, 0.40, 1.15, 1.27, 8.20, 17.53]),
        (Out, [10.05, 42.42, 1.96, 17.69, 0.33, 3.17, 1.48, 10.71, 12.19]),
        (In, [9.76, 5.21, 24.83, 19.60, 0.23, 1.23, 5.14, 13.64, 20.37]),
        (Island, [1.49, 7.22, 3.37, 49.82, 0.09, 1.44, 3.06, 16.91, 16.57]),
        (Tunnel, [12.51, 19.33, 5.84, 24.04, 2.98, 4.40, 9.82, 10.81, 10.24]),
        (Tin, [4.99, 22.71, 3.32, 31.28, 0.49, 9.18, 1.66, 13.42, 12.96]),
        (Tout, [3.41, 8.02, 8.37, 32.46, 0.46, 1.09, 16.90, 15.12, 14.19]),
        (Unknown, [6.71, 11.74, 5.09, 32.46, 0.18, 1.55, 2.84, 3.99, 35.48]),
        (Dead, [0.06, 0.12, 0.11, 0.85, 0.00, 0.02, 0.09, 3.19, 95.55]),
        (New, [8.90, 11.72, 8.02, 52.71, 0.17, 2.20, 3.49, 12.77, 0.00]),
    ])
}

impl GenConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: GenConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("generator config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: GenConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("generator config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads TOML, or JSON when the file name ends in `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.years == 0 {
            return bad("years must be at least 1".into());
        }
        if self.initial_sites == 0 {
            return bad("initial_sites must be at least 1".into());
        }
        if !(self.site_growth_factor.is_finite() && self.site_growth_factor > 0.0) {
            return bad(format!("site_growth_factor must be positive, got {}", self.site_growth_factor));
        }
        for (name, theta) in [
            ("pages_theta", self.pages_theta),
            ("content_theta", self.content_theta),
            ("indeg_theta", self.indeg_theta),
            ("outdeg_theta", self.outdeg_theta),
            ("multiplicity_theta", self.multiplicity_theta),
        ] {
            if !(theta.is_finite() && theta > 1.0) {
                return bad(format!("{name} must exceed 1, got {theta}"));
            }
        }
        if !(0.0..1.0).contains(&self.one_page_share) {
            return bad(format!("one_page_share must lie in [0, 1), got {}", self.one_page_share));
        }
        if self.max_value < 2 || self.content_max_mb < 1 || self.max_multiplicity < 1 {
            return bad("max_value must be at least 2, content_max_mb and max_multiplicity at least 1".into());
        }
        for state in MigrationState::ALL {
            let Some(row) = self.transitions.get(&state) else {
                return bad(format!("transition row {state} is missing"));
            };
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return bad(format!("transition row {state} has a negative or non-finite entry"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 100.0).abs() > 0.5 {
                return bad(format!("transition row {state} sums to {sum}, not 100"));
            }
        }
        let new_row = &self.transitions[&MigrationState::New];
        if new_row[..7].iter().sum::<f64>() <= 0.0 {
            return bad("NEW row sends no site to a component".into());
        }
        Ok(())
    }

    fn row(&self, state: MigrationState) -> [f64; DESTINATIONS] {
        self.transitions[&state]
    }
}

/// Generated series plus bookkeeping about how closely it follows the plan.
#[derive(Debug, Clone)]
pub struct Generated {
    pub series: SnapshotSeries,
    /// Per year, crawled sites whose realized component differs from the
    /// assigned one (only possible when a component needed for wiring is
    /// empty).
    pub label_mismatches: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Site {
    pages: u64,
    content_bytes: u64,
    out_target: u64,
    in_target: u64,
    state: MigrationState,
}

struct Samplers {
    pages: DiscretePowerLaw,
    content: DiscretePowerLaw,
    indeg: DiscretePowerLaw,
    outdeg: DiscretePowerLaw,
    multiplicity: DiscretePowerLaw,
}

pub fn generate(cfg: &GenConfig) -> Result<SnapshotSeries> {
    Ok(generate_detailed(cfg)?.series)
}

pub fn generate_detailed(cfg: &GenConfig) -> Result<Generated> {
    cfg.validate()?;
    let samplers = Samplers {
        pages: DiscretePowerLaw::new(cfg.pages_theta, 2, cfg.max_value)?,
        content: DiscretePowerLaw::new(cfg.content_theta, 1, cfg.content_max_mb)?,
        indeg: DiscretePowerLaw::new(cfg.indeg_theta, 1, cfg.max_value)?,
        outdeg: DiscretePowerLaw::new(cfg.outdeg_theta, 1, cfg.max_value)?,
        multiplicity: DiscretePowerLaw::new(cfg.multiplicity_theta, 1, cfg.max_multiplicity)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trackers: Vec<Apportioner<DESTINATIONS>> = MigrationState::ALL
        .iter()
        .map(|&s| Apportioner::new(cfg.row(s)))
        .collect();
    let new_row = cfg.row(MigrationState::New);
    let new_crawled_share = new_row[..7].iter().sum::<f64>() / new_row.iter().sum::<f64>();

    let mut sites: Vec<Site> = Vec::new();
    let mut snapshots = Vec::with_capacity(cfg.years);
    let mut label_mismatches = Vec::with_capacity(cfg.years);
    let mut prev_crawled = 0usize;
    for y in 0..cfg.years {
        let cohort = if y == 0 {
            let counts = first_cohort(cfg);
            let n = counts.iter().sum();
            trackers[MigrationState::New.index()].record(n, &counts);
            counts
        } else {
            transition(&mut sites, &mut trackers, cfg.sampling, &mut rng);
            let crawled = sites.iter().filter(|s| s.state.component().is_some()).count();
            let target = (prev_crawled as f64 * cfg.site_growth_factor).ceil() as usize;
            let n = if target > crawled {
                ((target - crawled) as f64 / new_crawled_share).ceil() as usize
            } else {
                0
            };
            trackers[MigrationState::New.index()].allocate(n, cfg.sampling, &mut rng)
        };
        spawn(&mut sites, &cohort, &samplers, cfg, &mut rng);

        let label = cfg.first_year + y as i32;
        let (snapshot, mismatches) = build_year(label, &mut sites, &samplers, &mut rng)?;
        prev_crawled = snapshot.crawled().count();
        snapshots.push(snapshot);
        label_mismatches.push(mismatches);
    }
    Ok(Generated {
        series: SnapshotSeries::new(snapshots)?,
        label_mismatches,
    })
}

pub fn hostname(index: usize) -> SiteId {
    SiteId::parse(&format!("s{index:07}.synth.cl")).expect("valid synthetic hostname")
}

/// First-year population: `initial_sites` crawled sites split over the
/// components as the NEW row prescribes, plus unknown and dead sites in the
/// same proportion to them.
fn first_cohort(cfg: &GenConfig) -> [usize; DESTINATIONS] {
    let row = cfg.row(MigrationState::New);
    let crawled_pct: f64 = row[..7].iter().sum();
    let n = cfg.initial_sites as f64;
    let mut quotas = [0.0; 7];
    for (q, p) in quotas.iter_mut().zip(&row[..7]) {
        *q = n * p / crawled_pct;
    }
    let comps = largest_remainder(&quotas, cfg.initial_sites);
    let mut counts = [0; DESTINATIONS];
    counts[..7].copy_from_slice(&comps);
    counts[7] = (n * row[7] / crawled_pct).round() as usize;
    counts[8] = (n * row[8] / crawled_pct).round() as usize;
    counts
}

fn transition(
    sites: &mut [Site],
    trackers: &mut [Apportioner<DESTINATIONS>],
    sampling: Sampling,
    rng: &mut ChaCha8Rng,
) {
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); STATE_COUNT];
    for (i, s) in sites.iter().enumerate() {
        groups[s.state.index()].push(i);
    }
    for (state, mut members) in groups.into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        members.shuffle(rng);
        let counts = trackers[state].allocate(members.len(), sampling, rng);
        let mut it = members.into_iter();
        for (dest, &c) in counts.iter().enumerate() {
            for i in it.by_ref().take(c) {
                sites[i].state = MigrationState::ALL[dest];
            }
        }
    }
}

fn spawn(
    sites: &mut Vec<Site>,
    counts: &[usize; DESTINATIONS],
    samplers: &Samplers,
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) {
    // Crawled and uncrawled newcomers are stratified separately so that the
    // crawled population on its own covers every stratum.
    let mut cohort = Vec::with_capacity(counts.iter().sum());
    for group in [0..7, 7..DESTINATIONS] {
        let states: Vec<MigrationState> = group
            .flat_map(|dest| std::iter::repeat_n(MigrationState::ALL[dest], counts[dest]))
            .collect();
        cohort.extend(draw_sites(&states, samplers, cfg, rng));
    }
    cohort.shuffle(rng);
    sites.extend(cohort);
}

fn draw_sites(
    states: &[MigrationState],
    samplers: &Samplers,
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Site> {
    let n = states.len();
    let q = cfg.one_page_share;
    let pages = uniforms(rng, n, cfg.sampling);
    let content = uniforms(rng, n, cfg.sampling);
    let content_jitter = uniforms(rng, n, Sampling::Independent);
    let outdeg = uniforms(rng, n, cfg.sampling);
    let indeg = uniforms(rng, n, cfg.sampling);
    (0..n)
        .map(|i| {
            let page_count = if pages[i] < q {
                1
            } else {
                samplers.pages.quantile((pages[i] - q) / (1.0 - q))
            };
            let mb = samplers.content.quantile(content[i]);
            Site {
                pages: page_count,
                content_bytes: mb * MB + (content_jitter[i] * MB as f64) as u64,
                out_target: samplers.outdeg.quantile(outdeg[i]),
                in_target: samplers.indeg.quantile(indeg[i]),
                state: states[i],
            }
        })
        .collect()
}

/// Wires the crawled sites, decomposes the result and adopts the realized
/// components as the sites' states.
fn build_year(
    label: i32,
    sites: &mut [Site],
    samplers: &Samplers,
    rng: &mut ChaCha8Rng,
) -> Result<(Snapshot, usize)> {
    let crawled: Vec<usize> = (0..sites.len())
        .filter(|&i| sites[i].state.component().is_some())
        .collect();
    let nodes: Vec<WireNode> = crawled
        .iter()
        .map(|&i| WireNode {
            label: sites[i].state.component().expect("crawled"),
            out_target: sites[i].out_target,
            in_target: sites[i].in_target,
        })
        .collect();
    let arcs = wire(&nodes, &samplers.multiplicity, rng);

    // Hostnames sort in creation order, so local indices double as graph
    // indices.
    let ids: Vec<SiteId> = crawled.iter().map(|&i| hostname(i)).collect();
    let pages: Vec<u64> = crawled.iter().map(|&i| sites[i].pages).collect();
    let g = HostGraph::from_arcs(ids.clone(), pages, arcs.iter().map(|&(u, v, _)| (u, v, 1)))?;
    let d = decompose_bowtie(&g);
    let mut mismatches = 0;
    for (local, &i) in crawled.iter().enumerate() {
        let realized = MigrationState::from(d.labels()[local]);
        if realized != sites[i].state {
            mismatches += 1;
            sites[i].state = realized;
        }
    }

    let records: Vec<SiteRecord> = sites
        .iter()
        .enumerate()
        .map(|(i, s)| match s.state {
            MigrationState::Unknown => SiteRecord::not_crawled(hostname(i), SiteStatus::Unknown),
            MigrationState::Dead => SiteRecord::not_crawled(hostname(i), SiteStatus::Dead),
            _ => SiteRecord::crawled(hostname(i), s.pages, s.content_bytes),
        })
        .collect();
    let links: Vec<(SiteId, SiteId, u64)> = arcs
        .into_iter()
        .map(|(u, v, m)| (ids[u].clone(), ids[v].clone(), m))
        .collect();
    Ok((Snapshot::new(label, records, links)?, mismatches))
}
