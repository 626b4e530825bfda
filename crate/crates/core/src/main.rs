use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use webdyn::metrics::FitRange;
use webdyn::report::{load_input, write_files, Analysis, ReportConfig};
use webdyn::snapshot::write_series;
use webdyn::synthgen::{generate_detailed, GenConfig};
use webdyn::{Error, Result};

// Like println!, but a closed stdout (e.g. `| head`) is not a panic.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

/// Analysis of yearly web crawl snapshots.
#[derive(Parser)]
#[command(name = "webdyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collection statistics and one-page share per year.
    Stats(Common),
    /// Every analysis, written as report.json plus tables.
    Report(Common),
    /// Bow-tie component sizes per year.
    Decompose(Common),
    /// Power-law fits of pages, content, degrees and PageRank.
    Fit(Common),
    /// Accumulation curves.
    Curves(Common),
    /// Per-site PageRank.
    Pagerank(Common),
    /// Growth factors of sites, pages and content.
    Growth(Common),
    /// Component migration matrix and most frequent migrations.
    Migrate(Common),
    /// Sites with the highest average yearly share.
    RankStable(Common),
    /// Writes a synthetic snapshot series.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct Common {
    /// Directory holding one subdirectory per year.
    #[arg(long)]
    input: PathBuf,
    /// Years to load: `2000..2007`, `2001,2003` or a single year.
    #[arg(long)]
    years: Option<String>,
    /// Report configuration (TOML, or JSON by extension).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where to write tables; required for `report`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    damping: Option<f64>,
    /// Override a fit range, e.g. `pages=10,500`. Repeatable.
    #[arg(long = "fit-range", value_name = "KIND=MIN,MAX")]
    fit_ranges: Vec<String>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    /// Generator configuration (TOML, or JSON by extension).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of yearly snapshots.
    #[arg(long)]
    years: Option<usize>,
    #[arg(long)]
    initial_sites: Option<usize>,
}

enum Failure {
    Input(Error),
    Sections(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Stats(c) => analyze(c, &["stats", "one_page"], false),
        Command::Report(c) => analyze(c, Analysis::section_names(), true),
        Command::Decompose(c) => analyze(c, &["decomposition"], false),
        Command::Fit(c) => analyze(c, &["powerlaws"], false),
        Command::Curves(c) => analyze(c, &["curves"], false),
        Command::Pagerank(c) => analyze(c, &["pagerank"], false),
        Command::Growth(c) => analyze(c, &["growth"], false),
        Command::Migrate(c) => analyze(c, &["migrations"], false),
        Command::RankStable(c) => analyze(c, &["stable_sites"], false),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Sections(errors)) => {
            for e in errors {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_years(spec: &str) -> Result<Vec<i32>> {
    let bad = || Error::Config(format!("cannot parse years {spec:?}"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: i32 = a.trim().parse().map_err(|_| bad())?;
        let b: i32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    spec.split(',')
        .map(|y| y.trim().parse().map_err(|_| bad()))
        .collect()
}

fn apply_fit_range(cfg: &mut ReportConfig, spec: &str) -> Result<()> {
    let bad = || Error::Config(format!("cannot parse fit range {spec:?}, expected KIND=MIN,MAX"));
    let (kind, bounds) = spec.split_once('=').ok_or_else(bad)?;
    let (min, max) = bounds.split_once(',').ok_or_else(bad)?;
    let range = FitRange::new(
        min.trim().parse().map_err(|_| bad())?,
        max.trim().parse().map_err(|_| bad())?,
    )?;
    let r = &mut cfg.fit_ranges;
    match kind.trim() {
        "pages" => r.pages = range,
        "content" | "content_mb" => r.content_mb = range,
        "in_degree" | "indegree" => r.in_degree = range,
        "out_degree" | "outdegree" => r.out_degree = range,
        "pagerank" => r.pagerank = range,
        other => return Err(Error::Config(format!("unknown fit range kind {other:?}"))),
    }
    Ok(())
}

fn report_config(c: &Common) -> Result<ReportConfig> {
    let mut cfg = match &c.config {
        Some(path) => ReportConfig::from_file(path)?,
        None => ReportConfig::default(),
    };
    if let Some(spec) = &c.years {
        cfg.years = Some(parse_years(spec)?);
    }
    if let Some(d) = c.damping {
        cfg.pagerank.damping = d;
    }
    for spec in &c.fit_ranges {
        apply_fit_range(&mut cfg, spec)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn analyze(c: Common, sections: &[&str], full_report: bool) -> std::result::Result<(), Failure> {
    let cfg = report_config(&c)?;
    if full_report && c.out.is_none() {
        return Err(Error::Config("report needs --out".into()).into());
    }
    let input = load_input(&c.input, cfg.years.as_deref())?;
    let analysis = Analysis::new(input, cfg)?;

    let mut errors = Vec::new();
    if full_report {
        let (bundle, files) = analysis.report();
        write_files(c.out.as_deref().expect("checked"), &files)?;
        for (name, s) in &bundle.sections {
            match &s.error {
                Some(e) => errors.push(format!("{name}: {e}")),
                None => out!("{name}: ok"),
            }
        }
    } else {
        let mut shown = BTreeMap::new();
        let mut files = BTreeMap::new();
        for &name in sections {
            let out = analysis.section(name).expect("known section");
            if let Some(e) = &out.section.error {
                errors.push(format!("{name}: {e}"));
            }
            shown.insert(name, out.section);
            files.extend(out.files);
        }
        out!("{}", serde_json::to_string_pretty(&shown).expect("sections serialize"));
        if let Some(dir) = &c.out {
            write_files(dir, &files)?;
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Failure::Sections(errors))
    }
}

fn generate(args: GenerateArgs) -> std::result::Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => GenConfig::from_file(path)?,
        None => GenConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(years) = args.years {
        cfg.years = years;
    }
    if let Some(n) = args.initial_sites {
        cfg.initial_sites = n;
    }
    let generated = generate_detailed(&cfg)?;
    write_series(Path::new(&args.out), &generated.series)?;
    for (snapshot, mismatches) in generated.series.snapshots().iter().zip(&generated.label_mismatches) {
        out!(
            "{}\t{} sites\t{} crawled\t{} links\t{} relabelled",
            snapshot.label(),
            snapshot.sites().len(),
            snapshot.crawled().count(),
            snapshot.links().len(),
            mismatches
        );
    }
    Ok(())
}
