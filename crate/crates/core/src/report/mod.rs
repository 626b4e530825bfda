//! End-to-end analysis of a snapshot series into a single JSON bundle plus
//! per-table text files.
//!
//! Each section is computed independently; a failure in one (say, an
//! unreadable links table) is recorded in that section and the others still
//! run.

mod load;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{
    component_timeline, migration_counts, site_contributions, stable_sites, top_migrations,
    Characteristic, Denominator, MigrationMatrix, PresenceRule,
};
use crate::graph::{decompose, Decomposition, HostGraph};
use crate::metrics::{
    accumulation_curve, content_mb_bin, fit_growth_with, fit_powerlaw, geometric_histogram,
    sum_pagerank_per_site, value_histogram, FitRange, GrowthMethod, PageRankConfig, SitePageRank,
};
use crate::snapshot::{bytes_to_mb, series_stats, SnapshotSeries, SnapshotStats};
use crate::{Error, Result};

pub use load::{load_input, Input};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitRanges {
    pub pages: FitRange,
    pub content_mb: FitRange,
    pub in_degree: FitRange,
    pub out_degree: FitRange,
    pub pagerank: FitRange,
}

impl Default for FitRanges {
    fn default() -> Self {
        FitRanges {
            pages: FitRange { min: 10.0, max: 500.0 },
            content_mb: FitRange { min: 1.0, max: 100.0 },
            in_degree: FitRange { min: 1.0, max: 100.0 },
            out_degree: FitRange { min: 1.0, max: 100.0 },
            pagerank: FitRange { min: 1e-7, max: 1e-4 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Years to load; every year directory when absent.
    pub years: Option<Vec<i32>>,
    pub fit_ranges: FitRanges,
    pub pagerank: PageRankConfig,
    pub pagerank_bins_per_decade: u32,
    pub growth_method: GrowthMethod,
    pub top_migrations: usize,
    pub migration_denominator: Denominator,
    pub stable_top_k: usize,
    pub presence: PresenceRule,
    /// Site fractions at which accumulation curves are sampled in the JSON.
    pub curve_grid: Vec<f64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            years: None,
            fit_ranges: FitRanges::default(),
            pagerank: PageRankConfig::default(),
            pagerank_bins_per_decade: 10,
            growth_method: GrowthMethod::LogLinear,
            top_migrations: 10,
            migration_denominator: Denominator::AllTransitions,
            stable_top_k: 10,
            presence: PresenceRule::default(),
            curve_grid: vec![0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0],
        }
    }
}

impl ReportConfig {
    /// Reads TOML, or JSON when the file name ends in `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ReportConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.fit_ranges;
        for range in [r.pages, r.content_mb, r.in_degree, r.out_degree, r.pagerank] {
            FitRange::new(range.min, range.max)?;
        }
        let d = self.pagerank.damping;
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Config(format!("damping must lie in (0, 1), got {d}")));
        }
        if self.pagerank_bins_per_decade == 0 || self.top_migrations == 0 || self.stable_top_k == 0 {
            return Err(Error::Config(
                "pagerank_bins_per_decade, top_migrations and stable_top_k must be positive".into(),
            ));
        }
        if self.curve_grid.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::Config("curve_grid fractions must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub status: SectionStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub data: Value,
}

impl Section {
    fn ok(data: Value, warnings: Vec<String>) -> Self {
        Section {
            status: SectionStatus::Ok,
            error: None,
            warnings,
            data,
        }
    }

    fn failed(error: String, data: Value, warnings: Vec<String>) -> Self {
        Section {
            status: SectionStatus::Error,
            error: Some(error),
            warnings,
            data,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == SectionStatus::Ok
    }
}

/// A section plus the text files that go with it, keyed by relative path.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionOutput {
    pub section: Section,
    pub files: BTreeMap<String, String>,
}

impl SectionOutput {
    fn bare(section: Section) -> Self {
        SectionOutput {
            section,
            files: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema_version: u32,
    pub tool_version: String,
    pub labels: Vec<i32>,
    pub sections: BTreeMap<String, Section>,
}

impl ReportBundle {
    pub fn has_errors(&self) -> bool {
        self.sections.values().any(|s| !s.is_ok())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("bundle serializes");
        text.push('\n');
        text
    }
}

/// Everything derived from a loaded series that more than one section needs.
pub struct Analysis {
    input: Input,
    config: ReportConfig,
    graphs: Vec<Option<HostGraph>>,
    decompositions: OnceLock<Vec<Option<Decomposition>>>,
    pageranks: OnceLock<Vec<std::result::Result<SitePageRank, String>>>,
}

const ALL_SECTIONS: [&str; 9] = [
    "stats",
    "one_page",
    "powerlaws",
    "pagerank",
    "curves",
    "decomposition",
    "growth",
    "migrations",
    "stable_sites",
];

impl Analysis {
    pub fn new(input: Input, config: ReportConfig) -> Result<Self> {
        config.validate()?;
        let graphs = input
            .series
            .snapshots()
            .par_iter()
            .map(|s| input.links_ok(s.label()).then(|| HostGraph::from_snapshot(s)))
            .collect();
        Ok(Analysis {
            input,
            config,
            graphs,
            decompositions: OnceLock::new(),
            pageranks: OnceLock::new(),
        })
    }

    pub fn series(&self) -> &SnapshotSeries {
        &self.input.series
    }

    pub fn config(&self) -> &ReportConfig {
        &self.config
    }

    pub fn graph(&self, index: usize) -> Option<&HostGraph> {
        self.graphs[index].as_ref()
    }

    fn graph_or_err(&self, index: usize) -> std::result::Result<&HostGraph, String> {
        let label = self.series().snapshots()[index].label();
        self.graph(index).ok_or_else(|| {
            format!(
                "links of {label} unavailable: {}",
                self.input.link_errors.get(&label).map_or("unknown reason", String::as_str)
            )
        })
    }

    pub fn decompositions(&self) -> &[Option<Decomposition>] {
        self.decompositions.get_or_init(|| {
            self.graphs
                .par_iter()
                .map(|g| g.as_ref().map(decompose))
                .collect()
        })
    }

    fn pageranks(&self) -> &[std::result::Result<SitePageRank, String>] {
        self.pageranks.get_or_init(|| {
            (0..self.series().len())
                .into_par_iter()
                .map(|i| {
                    let g = self.graph_or_err(i)?;
                    sum_pagerank_per_site(&self.series().snapshots()[i], g, &self.config.pagerank)
                        .map_err(|e| e.to_string())
                })
                .collect()
        })
    }

    pub fn section(&self, name: &str) -> Option<SectionOutput> {
        Some(match name {
            "stats" => self.stats_section(),
            "one_page" => self.one_page_section(),
            "powerlaws" => self.powerlaw_section(),
            "pagerank" => self.pagerank_section(),
            "curves" => self.curves_section(),
            "decomposition" => self.decomposition_section(),
            "growth" => self.growth_section(),
            "migrations" => self.migration_section(),
            "stable_sites" => self.stable_section(),
            _ => return None,
        })
    }

    pub fn section_names() -> &'static [&'static str] {
        &ALL_SECTIONS
    }

    /// Runs every section.
    pub fn report(&self) -> (ReportBundle, BTreeMap<String, String>) {
        let mut sections = BTreeMap::new();
        let mut files = BTreeMap::new();
        for name in ALL_SECTIONS {
            let out = self.section(name).expect("known section");
            sections.insert(name.to_string(), out.section);
            files.extend(out.files);
        }
        let bundle = ReportBundle {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            labels: self.series().labels(),
            sections,
        };
        files.insert("report.json".into(), bundle.to_json());
        (bundle, files)
    }

    fn link_warnings(&self) -> Vec<String> {
        self.input.link_errors.values().cloned().collect()
    }

    pub fn stats(&self) -> Vec<SnapshotStats> {
        series_stats(self.series())
    }

    fn stats_section(&self) -> SectionOutput {
        let stats = self.stats();
        let mut tsv = String::from(
            "year\tcrawled_sites\tnew_sites\tunknown_sites\tdead_sites\ttotal_pages\tcontent_mb\n",
        );
        for s in &stats {
            let _ = writeln!(
                tsv,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
                s.label,
                s.crawled_sites,
                s.new_sites,
                s.unknown_sites,
                s.dead_sites,
                s.total_pages,
                s.content_mb()
            );
        }
        let rows: Vec<Value> = stats
            .iter()
            .map(|s| {
                let mut v = serde_json::to_value(s).expect("stats serialize");
                v["content_mb"] = json!(s.content_mb());
                v
            })
            .collect();
        SectionOutput {
            section: Section::ok(json!(rows), Vec::new()),
            files: BTreeMap::from([("stats.tsv".to_string(), tsv)]),
        }
    }

    fn one_page_section(&self) -> SectionOutput {
        let rows: Vec<Value> = self
            .stats()
            .iter()
            .map(|s| {
                json!({
                    "label": s.label,
                    "crawled_sites": s.crawled_sites,
                    "one_page_sites": s.one_page_sites,
                    "share": s.one_page_share,
                })
            })
            .collect();
        SectionOutput::bare(Section::ok(json!(rows), Vec::new()))
    }

    fn degrees(&self, index: usize, incoming: bool) -> std::result::Result<Vec<u64>, String> {
        let g = self.graph_or_err(index)?;
        Ok((0..g.node_count())
            .map(|v| if incoming { g.in_degree(v) } else { g.out_degree(v) } as u64)
            .collect())
    }

    fn powerlaw_section(&self) -> SectionOutput {
        let ranges = self.config.fit_ranges;
        let mut failures = Vec::new();
        let mut warnings = Vec::new();
        let mut years = Vec::new();
        for (i, snapshot) in self.series().snapshots().iter().enumerate() {
            let label = snapshot.label();
            let mut record = |name: &str, outcome: std::result::Result<Result<_>, String>| -> Value {
                match outcome {
                    Ok(Ok(fit)) => json!({ "fit": fit }),
                    Ok(Err(Error::InsufficientData(msg))) => {
                        warnings.push(format!("{label} {name}: {msg}"));
                        json!({ "skipped": msg })
                    }
                    Ok(Err(e)) => {
                        failures.push(format!("{label} {name}: {e}"));
                        json!({ "error": e.to_string() })
                    }
                    Err(msg) => {
                        failures.push(format!("{label} {name}: {msg}"));
                        json!({ "error": msg })
                    }
                }
            };
            let pages: Vec<u64> = snapshot.crawled().map(|r| r.page_count).collect();
            let content: Vec<u64> = snapshot.crawled().map(|r| content_mb_bin(r.content_bytes)).collect();
            let fit_values = |values: &[u64], range| {
                let nonzero: Vec<u64> = values.iter().copied().filter(|&v| v > 0).collect();
                value_histogram(&nonzero).and_then(|h| fit_powerlaw(&h, range))
            };
            let pages_fit = record("pages", Ok(fit_values(&pages, ranges.pages)));
            let content_fit = record("content_mb", Ok(fit_values(&content, ranges.content_mb)));
            let in_fit = record(
                "in_degree",
                self.degrees(i, true).map(|d| fit_values(&d, ranges.in_degree)),
            );
            let out_fit = record(
                "out_degree",
                self.degrees(i, false).map(|d| fit_values(&d, ranges.out_degree)),
            );
            let pr_fit = record(
                "pagerank",
                self.pageranks()[i].clone().map(|pr| {
                    let values: Vec<f64> = pr.scores.values().copied().filter(|&v| v > 0.0).collect();
                    geometric_histogram(&values, self.config.pagerank_bins_per_decade)
                        .and_then(|h| fit_powerlaw(&h, ranges.pagerank))
                }),
            );
            years.push(json!({
                "label": label,
                "pages": pages_fit,
                "content_mb": content_fit,
                "in_degree": in_fit,
                "out_degree": out_fit,
                "pagerank": pr_fit,
            }));
        }
        let data = json!(years);
        SectionOutput::bare(if failures.is_empty() {
            Section::ok(data, warnings)
        } else {
            Section::failed(failures.join("; "), data, warnings)
        })
    }

    fn pagerank_section(&self) -> SectionOutput {
        let mut failures = Vec::new();
        let mut years = Vec::new();
        let mut files = BTreeMap::new();
        for (snapshot, pr) in self.series().snapshots().iter().zip(self.pageranks()) {
            let label = snapshot.label();
            match pr {
                Ok(pr) => {
                    let mut ranked: Vec<(&crate::snapshot::SiteId, f64)> =
                        pr.scores.iter().map(|(k, v)| (k, *v)).collect();
                    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
                    let top: Vec<Value> = ranked
                        .iter()
                        .take(self.config.stable_top_k)
                        .map(|(id, s)| json!({ "hostname": id, "score": s }))
                        .collect();
                    let mut tsv = String::from("hostname\tpagerank\n");
                    for (id, s) in &pr.scores {
                        let _ = writeln!(tsv, "{id}\t{s}");
                    }
                    files.insert(format!("pagerank_{label}.tsv"), tsv);
                    years.push(json!({ "label": label, "source": pr.source, "top": top }));
                }
                Err(e) => {
                    failures.push(format!("{label}: {e}"));
                    years.push(json!({ "label": label, "error": e }));
                }
            }
        }
        let data = json!(years);
        SectionOutput {
            section: if failures.is_empty() {
                Section::ok(data, Vec::new())
            } else {
                Section::failed(failures.join("; "), data, Vec::new())
            },
            files,
        }
    }

    fn curve_values(&self, index: usize, which: &str) -> std::result::Result<Vec<f64>, String> {
        let snapshot = &self.series().snapshots()[index];
        Ok(match which {
            "pages" => snapshot.crawled().map(|r| r.page_count as f64).collect(),
            "content" => snapshot.crawled().map(|r| r.content_bytes as f64).collect(),
            "in_degree" => self.degrees(index, true)?.into_iter().map(|d| d as f64).collect(),
            "out_degree" => self.degrees(index, false)?.into_iter().map(|d| d as f64).collect(),
            "pagerank" => self.pageranks()[index].clone()?.scores.into_values().collect(),
            _ => unreachable!("unknown curve {which}"),
        })
    }

    fn curves_section(&self) -> SectionOutput {
        let mut failures = Vec::new();
        let mut warnings = Vec::new();
        let mut files = BTreeMap::new();
        let mut years = Vec::new();
        for (i, snapshot) in self.series().snapshots().iter().enumerate() {
            let label = snapshot.label();
            let mut entry = serde_json::Map::new();
            entry.insert("label".into(), json!(label));
            for which in ["pages", "content", "in_degree", "out_degree", "pagerank"] {
                let curve = self
                    .curve_values(i, which)
                    .and_then(|v| accumulation_curve(&v).map_err(|e| e.to_string()));
                let value = match curve {
                    Ok(c) => {
                        files.insert(format!("curves/{which}_{label}.csv"), c.to_csv());
                        json!(c.resample(&self.config.curve_grid))
                    }
                    Err(e) if e.starts_with("insufficient data") => {
                        warnings.push(format!("{label} {which}: {e}"));
                        json!({ "skipped": e })
                    }
                    Err(e) => {
                        failures.push(format!("{label} {which}: {e}"));
                        json!({ "error": e })
                    }
                };
                entry.insert(which.into(), value);
            }
            years.push(Value::Object(entry));
        }
        let data = json!(years);
        SectionOutput {
            section: if failures.is_empty() {
                Section::ok(data, warnings)
            } else {
                Section::failed(failures.join("; "), data, warnings)
            },
            files,
        }
    }

    fn decomposition_section(&self) -> SectionOutput {
        let mut failures = Vec::new();
        let mut files = BTreeMap::new();
        let mut years = Vec::new();
        for (i, d) in self.decompositions().iter().enumerate() {
            let label = self.series().snapshots()[i].label();
            match d {
                Some(d) => {
                    files.insert(format!("decomposition_{label}.tsv"), d.to_tsv());
                    years.push(json!({ "label": label, "summary": d.summary() }));
                }
                None => {
                    let e = self.graph_or_err(i).err().unwrap_or_default();
                    failures.push(e.clone());
                    years.push(json!({ "label": label, "error": e }));
                }
            }
        }
        let data = json!(years);
        SectionOutput {
            section: if failures.is_empty() {
                Section::ok(data, Vec::new())
            } else {
                Section::failed(failures.join("; "), data, Vec::new())
            },
            files,
        }
    }

    fn growth_section(&self) -> SectionOutput {
        let stats = self.stats();
        let method = self.config.growth_method;
        let series: [(&str, Vec<f64>); 3] = [
            ("sites", stats.iter().map(|s| s.crawled_sites as f64).collect()),
            ("pages", stats.iter().map(|s| s.total_pages as f64).collect()),
            ("content_mb", stats.iter().map(|s| bytes_to_mb(s.total_content_bytes)).collect()),
        ];
        let mut data = serde_json::Map::new();
        let mut warnings = Vec::new();
        let mut failures = Vec::new();
        for (name, values) in series {
            let value = match fit_growth_with(&values, method) {
                Ok(fit) => json!({ "fit": fit, "values": values }),
                Err(Error::InsufficientData(msg)) => {
                    warnings.push(format!("{name}: {msg}"));
                    json!({ "skipped": msg, "values": values })
                }
                Err(e) => {
                    failures.push(format!("{name}: {e}"));
                    json!({ "error": e.to_string(), "values": values })
                }
            };
            data.insert(name.into(), value);
        }
        SectionOutput::bare(if failures.is_empty() {
            Section::ok(Value::Object(data), warnings)
        } else {
            Section::failed(failures.join("; "), Value::Object(data), warnings)
        })
    }

    pub fn migration_matrix(&self) -> Result<MigrationMatrix> {
        let decs: Vec<Decomposition> = self
            .decompositions()
            .iter()
            .enumerate()
            .map(|(i, d)| d.clone().ok_or_else(|| Error::InconsistentInput(self.graph_or_err(i).unwrap_err())))
            .collect::<Result<_>>()?;
        let timelines = component_timeline(self.series(), &decs)?;
        Ok(migration_counts(&timelines))
    }

    fn migration_section(&self) -> SectionOutput {
        let m = match self.migration_matrix() {
            Ok(m) => m,
            Err(e) => {
                return SectionOutput::bare(Section::failed(e.to_string(), Value::Null, self.link_warnings()))
            }
        };
        let mut files = BTreeMap::from([
            ("migration_percent.csv".to_string(), m.to_percent_csv()),
            ("migration_counts.csv".to_string(), m.to_count_csv()),
        ]);
        let mut data = json!({ "counts": m.counts });
        match top_migrations(&m, self.config.top_migrations, self.config.migration_denominator) {
            Ok(top) => {
                let mut tsv = String::from("rank\tfrom\tto\tcount\tpercent\n");
                for (i, t) in top.iter().enumerate() {
                    let _ = writeln!(tsv, "{}\t{}\t{}\t{}\t{:.4}", i + 1, t.from, t.to, t.count, t.percent);
                }
                files.insert("top_migrations.tsv".into(), tsv);
                data["top"] = json!(top);
                data["denominator"] = json!(self.config.migration_denominator);
                SectionOutput {
                    section: Section::ok(data, Vec::new()),
                    files,
                }
            }
            Err(Error::InsufficientData(msg)) => SectionOutput {
                section: Section::ok(data, vec![msg]),
                files,
            },
            Err(e) => SectionOutput {
                section: Section::failed(e.to_string(), data, Vec::new()),
                files,
            },
        }
    }

    pub fn stable_ranking(&self, characteristic: Characteristic) -> Result<crate::dynamics::StableSiteRanking> {
        let mut contributions = BTreeMap::new();
        for (i, snapshot) in self.series().snapshots().iter().enumerate() {
            let g = if characteristic.needs_links() {
                Some(self.graph_or_err(i).map_err(Error::InconsistentInput)?)
            } else {
                None
            };
            contributions.insert(snapshot.label(), site_contributions(snapshot, g, characteristic)?);
        }
        stable_sites(
            self.series(),
            &contributions,
            characteristic,
            self.config.stable_top_k,
            self.config.presence,
        )
    }

    fn stable_section(&self) -> SectionOutput {
        let mut data = serde_json::Map::new();
        let mut files = BTreeMap::new();
        let mut warnings = Vec::new();
        let mut failures = Vec::new();
        for ch in Characteristic::ALL {
            let value = match self.stable_ranking(ch) {
                Ok(r) => {
                    files.insert(format!("stable_{}.tsv", ch.as_str()), r.to_tsv());
                    warnings.extend(r.warnings.iter().map(|w| format!("{}: {w}", ch.as_str())));
                    json!(r.entries)
                }
                Err(Error::InsufficientData(msg)) => {
                    warnings.push(format!("{}: {msg}", ch.as_str()));
                    json!({ "skipped": msg })
                }
                Err(e) => {
                    failures.push(format!("{}: {e}", ch.as_str()));
                    json!({ "error": e.to_string() })
                }
            };
            data.insert(ch.as_str().into(), value);
        }
        let data = Value::Object(data);
        SectionOutput {
            section: if failures.is_empty() {
                Section::ok(data, warnings)
            } else {
                Section::failed(failures.join("; "), data, warnings)
            },
            files,
        }
    }
}

/// Writes `files` (relative paths) under `dir`, creating directories.
pub fn write_files(dir: &Path, files: &BTreeMap<String, String>) -> Result<()> {
    for (rel, text) in files {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Loads `input_dir`, runs every section and writes the bundle and tables
/// into `out_dir`.
pub fn run_report(input_dir: &Path, config: &ReportConfig, out_dir: &Path) -> Result<ReportBundle> {
    let input = load_input(input_dir, config.years.as_deref())?;
    let analysis = Analysis::new(input, config.clone())?;
    let (bundle, files) = analysis.report();
    write_files(out_dir, &files)?;
    Ok(bundle)
}
