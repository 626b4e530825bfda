use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use crate::snapshot::{list_year_dirs, parse_links, parse_sites, Snapshot, SnapshotSeries, LINKS_FILE, SITES_FILE};
use crate::{Error, Result};

/// A series whose link tables may be partly unreadable.
#[derive(Debug, Clone)]
pub struct Input {
    pub series: SnapshotSeries,
    /// Years whose links could not be read, with the reason. Those years
    /// carry no links in `series`.
    pub link_errors: BTreeMap<i32, String>,
}

impl Input {
    pub fn from_series(series: SnapshotSeries) -> Self {
        Input {
            series,
            link_errors: BTreeMap::new(),
        }
    }

    pub fn links_ok(&self, label: i32) -> bool {
        !self.link_errors.contains_key(&label)
    }
}

/// Loads `<dir>/<year>/` for the given years, or every year directory.
///
/// A missing or malformed sites table is an error. A broken links table only
/// marks that year as having no usable hostgraph.
pub fn load_input(dir: &Path, years: Option<&[i32]>) -> Result<Input> {
    let years = match years {
        Some(y) => y.to_vec(),
        None => list_year_dirs(dir)?,
    };
    if years.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no year directories under {}",
            dir.display()
        )));
    }
    let mut snapshots = Vec::with_capacity(years.len());
    let mut link_errors = BTreeMap::new();
    for year in years {
        let year_dir = dir.join(year.to_string());
        let sites_path = year_dir.join(SITES_FILE);
        let file = File::open(&sites_path).map_err(|e| Error::io(&sites_path, e))?;
        let sites = parse_sites(file, &sites_path.display().to_string())?;

        let links_path = year_dir.join(LINKS_FILE);
        let parsed = File::open(&links_path)
            .map_err(|e| Error::io(&links_path, e))
            .and_then(|f| parse_links(f, &links_path.display().to_string(), year, sites.clone()));
        match parsed {
            Ok(snapshot) => snapshots.push(snapshot),
            Err(e) => {
                let message = match e {
                    Error::Parse { .. } | Error::Io { .. } => e.to_string(),
                    other => format!("{}: {other}", links_path.display()),
                };
                link_errors.insert(year, message);
                snapshots.push(Snapshot::from_parts(year, sites, Vec::new(), 0));
            }
        }
    }
    Ok(Input {
        series: SnapshotSeries::new(snapshots)?,
        link_errors,
    })
}
