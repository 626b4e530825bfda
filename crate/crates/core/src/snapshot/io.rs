//! TSV formats and the `<year>/sites.tsv`, `<year>/links.tsv` layout.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{collect_sites, merge_links, SiteId, SiteRecord, SiteStatus, Snapshot, SnapshotSeries};
use crate::{Error, Result};

pub const SITES_FILE: &str = "sites.tsv";
pub const LINKS_FILE: &str = "links.tsv";

const SITES_HEADER: [&str; 4] = ["hostname", "status", "pages", "bytes"];
const LINKS_HEADER: [&str; 2] = ["src", "dst"];

type Line = (usize, String);

/// Data lines of a TSV stream with their 1-based line numbers. Blank lines
/// and `#` comments are skipped; the first remaining line is the header.
fn data_lines<R: Read>(reader: R, file: &str) -> Result<(Option<Line>, Vec<Line>)> {
    let mut header = None;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            file: file.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        if header.is_none() {
            header = Some((i + 1, line.to_string()));
        } else {
            rows.push((i + 1, line.to_string()));
        }
    }
    Ok((header, rows))
}

fn parse_err(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

fn check_header(file: &str, header: Option<Line>, expected: &[&str]) -> Result<usize> {
    let (line, text) = header.ok_or_else(|| parse_err(file, 1, "missing header"))?;
    let fields: Vec<&str> = text.split('\t').map(str::trim).collect();
    if fields.len() < expected.len() || fields[..expected.len()] != *expected {
        return Err(parse_err(
            file,
            line,
            format!("expected header starting with {:?}, got {:?}", expected.join("\t"), text),
        ));
    }
    Ok(fields.len())
}

fn parse_site_row(file: &str, line: usize, text: &str) -> Result<SiteRecord> {
    let fields: Vec<&str> = text.split('\t').collect();
    if !(4..=5).contains(&fields.len()) {
        return Err(parse_err(
            file,
            line,
            format!("expected 4 or 5 fields, found {}", fields.len()),
        ));
    }
    let id = SiteId::parse(fields[0]).map_err(|e| parse_err(file, line, e.to_string()))?;
    let status: SiteStatus = fields[1].parse().map_err(|e: String| parse_err(file, line, e))?;
    let page_count = fields[2]
        .trim()
        .parse::<u64>()
        .map_err(|e| parse_err(file, line, format!("pages: {e}")))?;
    let content_bytes = fields[3]
        .trim()
        .parse::<u64>()
        .map_err(|e| parse_err(file, line, format!("bytes: {e}")))?;
    let pagerank_sum = match fields.get(4).map(|s| s.trim()) {
        None | Some("") => None,
        Some(raw) => Some(
            raw.parse::<f64>()
                .map_err(|e| parse_err(file, line, format!("pagerank_sum: {e}")))?,
        ),
    };
    Ok(SiteRecord {
        id,
        status,
        page_count,
        content_bytes,
        pagerank_sum,
    })
}

/// Parses a sites table into records keyed by site id.
pub fn parse_sites<R: Read>(reader: R, file: &str) -> Result<BTreeMap<SiteId, SiteRecord>> {
    let (header, rows) = data_lines(reader, file)?;
    check_header(file, header, &SITES_HEADER)?;
    let mut records = Vec::with_capacity(rows.len());
    for (line, text) in rows {
        records.push(parse_site_row(file, line, &text)?);
    }
    collect_sites(records)
}

/// Parses a links table against already-parsed sites and returns the
/// finished snapshot.
pub fn parse_links<R: Read>(
    reader: R,
    file: &str,
    label: i32,
    sites: BTreeMap<SiteId, SiteRecord>,
) -> Result<Snapshot> {
    let (header, rows) = data_lines(reader, file)?;
    check_header(file, header, &LINKS_HEADER)?;
    let mut raw = Vec::with_capacity(rows.len());
    for (line, text) in rows {
        let fields: Vec<&str> = text.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(
                file,
                line,
                format!("expected 2 or 3 fields, found {}", fields.len()),
            ));
        }
        let src = SiteId::parse(fields[0]).map_err(|e| parse_err(file, line, e.to_string()))?;
        let dst = SiteId::parse(fields[1]).map_err(|e| parse_err(file, line, e.to_string()))?;
        let multiplicity = match fields.get(2).map(|s| s.trim()) {
            None | Some("") => 1,
            Some(raw) => raw
                .parse::<u64>()
                .ok()
                .filter(|&m| m > 0)
                .ok_or_else(|| {
                    parse_err(file, line, format!("multiplicity must be a positive integer, got {raw:?}"))
                })?,
        };
        raw.push((src, dst, multiplicity));
    }
    let (links, dropped) = merge_links(&sites, raw)?;
    Ok(Snapshot::from_parts(label, sites, links, dropped))
}

/// Parses a snapshot from its two TSV streams.
pub fn parse_snapshot<S: Read, L: Read>(sites: S, links: L, label: i32) -> Result<Snapshot> {
    let sites = parse_sites(sites, SITES_FILE)?;
    parse_links(links, LINKS_FILE, label, sites)
}

/// Writes the sites table in canonical (hostname-sorted) order.
pub fn write_sites<W: Write>(snapshot: &Snapshot, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    let with_pagerank = snapshot.sites().values().any(|r| r.pagerank_sum.is_some());
    if with_pagerank {
        writeln!(out, "hostname\tstatus\tpages\tbytes\tpagerank_sum")?;
    } else {
        writeln!(out, "hostname\tstatus\tpages\tbytes")?;
    }
    for r in snapshot.sites().values() {
        write!(
            out,
            "{}\t{}\t{}\t{}",
            r.id,
            r.status.as_str(),
            r.page_count,
            r.content_bytes
        )?;
        if with_pagerank {
            match r.pagerank_sum {
                Some(pr) => write!(out, "\t{pr}")?,
                None => write!(out, "\t")?,
            }
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Writes the links table in canonical `(src, dst)` order.
pub fn write_links<W: Write>(snapshot: &Snapshot, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "src\tdst\tmultiplicity")?;
    for l in snapshot.links() {
        writeln!(out, "{}\t{}\t{}", l.src, l.dst, l.multiplicity)?;
    }
    out.flush()
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

/// Reads `<dir>/<year>/sites.tsv` and `<dir>/<year>/links.tsv`.
pub fn read_snapshot_dir(dir: &Path, year: i32) -> Result<Snapshot> {
    let year_dir = dir.join(year.to_string());
    let sites_path = year_dir.join(SITES_FILE);
    let links_path = year_dir.join(LINKS_FILE);
    let sites = parse_sites(open(&sites_path)?, &sites_path.display().to_string())?;
    parse_links(
        open(&links_path)?,
        &links_path.display().to_string(),
        year,
        sites,
    )
}

pub fn write_snapshot_dir(dir: &Path, snapshot: &Snapshot) -> Result<()> {
    let year_dir = dir.join(snapshot.label().to_string());
    fs::create_dir_all(&year_dir).map_err(|e| Error::io(&year_dir, e))?;
    let sites_path = year_dir.join(SITES_FILE);
    let file = fs::File::create(&sites_path).map_err(|e| Error::io(&sites_path, e))?;
    write_sites(snapshot, file).map_err(|e| Error::io(&sites_path, e))?;
    let links_path = year_dir.join(LINKS_FILE);
    let file = fs::File::create(&links_path).map_err(|e| Error::io(&links_path, e))?;
    write_links(snapshot, file).map_err(|e| Error::io(&links_path, e))?;
    Ok(())
}

pub fn write_series(dir: &Path, series: &SnapshotSeries) -> Result<()> {
    for snapshot in series.snapshots() {
        write_snapshot_dir(dir, snapshot)?;
    }
    Ok(())
}

/// Year subdirectories of `dir` (names that parse as integers), sorted.
pub fn list_year_dirs(dir: &Path) -> Result<Vec<i32>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut years = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if !entry.path().is_dir() {
            continue;
        }
        if let Some(year) = entry.file_name().to_str().and_then(|n| n.parse::<i32>().ok()) {
            years.push(year);
        }
    }
    years.sort_unstable();
    Ok(years)
}

/// Loads the given years (or every year directory when `years` is `None`).
pub fn load_series(dir: &Path, years: Option<&[i32]>) -> Result<SnapshotSeries> {
    let years = match years {
        Some(y) => y.to_vec(),
        None => list_year_dirs(dir)?,
    };
    let snapshots = years
        .iter()
        .map(|&y| read_snapshot_dir(dir, y))
        .collect::<Result<Vec<_>>>()?;
    SnapshotSeries::new(snapshots)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SITES: &str = "# crawl 2000\nhostname\tstatus\tpages\tbytes\n\
        a.cl\tcrawled\t3\t300\nB.cl\tcrawled\t1\t10\nc.cl\tcrawled\t2\t20\nd.cl\tdead\t0\t0\n";

    #[test]
    fn duplicate_link_rows_sum_multiplicity() {
        let links = "src\tdst\tmultiplicity\na.cl\tb.cl\na.cl\tb.cl\n";
        let snap = parse_snapshot(SITES.as_bytes(), links.as_bytes(), 2000).unwrap();
        assert_eq!(snap.links().len(), 1);
        assert_eq!(snap.links()[0].multiplicity, 2);
        assert_eq!(snap.sites().len(), 4);
    }

    #[test]
    fn link_to_absent_host_fails() {
        let links = "src\tdst\na.cl\tzzz.cl\t1\n";
        let err = parse_snapshot(SITES.as_bytes(), links.as_bytes(), 2000).unwrap_err();
        assert!(matches!(err, Error::ReferentialIntegrity { .. }));
    }

    #[test]
    fn dead_row_with_pages_fails() {
        let sites = "hostname\tstatus\tpages\tbytes\nx\tdead\t5\t100\n";
        let err = parse_sites(sites.as_bytes(), SITES_FILE).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { .. }));
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let sites = "hostname\tstatus\tpages\tbytes\na.cl\tcrawled\t1\t1\nb.cl\tcrawled\tmany\t1\n";
        match parse_sites(sites.as_bytes(), "s.tsv").unwrap_err() {
            Error::Parse { line, file, .. } => {
                assert_eq!(line, 3);
                assert_eq!(file, "s.tsv");
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad_status = "hostname\tstatus\tpages\tbytes\na.cl\tasleep\t1\t1\n";
        assert!(matches!(
            parse_sites(bad_status.as_bytes(), "s.tsv"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn missing_header_is_a_parse_error() {
        assert!(parse_sites("a.cl\tcrawled\t1\t1\n".as_bytes(), "s").is_err());
        assert!(parse_sites("".as_bytes(), "s").is_err());
    }

    #[test]
    fn pagerank_column_round_trips() {
        let sites = "hostname\tstatus\tpages\tbytes\tpagerank_sum\n\
            a.cl\tcrawled\t1\t1\t0.25\nb.cl\tcrawled\t1\t1\t0.75\nc.cl\tunknown\t0\t0\t\n";
        let snap = parse_snapshot(sites.as_bytes(), "src\tdst\n".as_bytes(), 2004).unwrap();
        let mut buf = Vec::new();
        write_sites(&snap, &mut buf).unwrap();
        let again = parse_snapshot(buf.as_slice(), "src\tdst\n".as_bytes(), 2004).unwrap();
        assert_eq!(snap, again);
    }
}
