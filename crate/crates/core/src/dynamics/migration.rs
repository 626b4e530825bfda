use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Timelines;
use crate::graph::ComponentLabel;
use crate::{Error, Result};

/// A bow-tie component or one of the pseudo-states used for migrations.
///
/// Declaration order is the row/column order of the migration tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MigrationState {
    Main,
    Out,
    In,
    Island,
    Tunnel,
    Tin,
    Tout,
    Unknown,
    Dead,
    New,
}

pub const STATE_COUNT: usize = 10;

impl MigrationState {
    pub const ALL: [MigrationState; STATE_COUNT] = [
        MigrationState::Main,
        MigrationState::Out,
        MigrationState::In,
        MigrationState::Island,
        MigrationState::Tunnel,
        MigrationState::Tin,
        MigrationState::Tout,
        MigrationState::Unknown,
        MigrationState::Dead,
        MigrationState::New,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MigrationState::Main => "MAIN",
            MigrationState::Out => "OUT",
            MigrationState::In => "IN",
            MigrationState::Island => "ISLAND",
            MigrationState::Tunnel => "TUNNEL",
            MigrationState::Tin => "TIN",
            MigrationState::Tout => "TOUT",
            MigrationState::Unknown => "UNKNOWN",
            MigrationState::Dead => "DEAD",
            MigrationState::New => "NEW",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
    }

    pub fn component(self) -> Option<ComponentLabel> {
        Some(match self {
            MigrationState::Main => ComponentLabel::Main,
            MigrationState::Out => ComponentLabel::Out,
            MigrationState::In => ComponentLabel::In,
            MigrationState::Island => ComponentLabel::Island,
            MigrationState::Tunnel => ComponentLabel::Tunnel,
            MigrationState::Tin => ComponentLabel::Tin,
            MigrationState::Tout => ComponentLabel::Tout,
            _ => return None,
        })
    }
}

impl From<ComponentLabel> for MigrationState {
    fn from(label: ComponentLabel) -> Self {
        match label {
            ComponentLabel::Main => MigrationState::Main,
            ComponentLabel::Out => MigrationState::Out,
            ComponentLabel::In => MigrationState::In,
            ComponentLabel::Island => MigrationState::Island,
            ComponentLabel::Tunnel => MigrationState::Tunnel,
            ComponentLabel::Tin => MigrationState::Tin,
            ComponentLabel::Tout => MigrationState::Tout,
        }
    }
}

impl fmt::Display for MigrationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Year-over-year transition counts, indexed `[from][to]` in
/// [`MigrationState::ALL`] order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MigrationMatrix {
    pub counts: [[u64; STATE_COUNT]; STATE_COUNT],
}

impl MigrationMatrix {
    pub fn count(&self, from: MigrationState, to: MigrationState) -> u64 {
        self.counts[from.index()][to.index()]
    }

    pub fn add(&mut self, from: MigrationState, to: MigrationState, n: u64) {
        self.counts[from.index()][to.index()] += n;
    }

    pub fn row_total(&self, from: MigrationState) -> u64 {
        self.counts[from.index()].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Row of percentages summing to 100, or all zeros for an empty row.
    pub fn row_percent(&self, from: MigrationState) -> [f64; STATE_COUNT] {
        let total = self.row_total(from);
        let mut out = [0.0; STATE_COUNT];
        if total > 0 {
            for (o, &c) in out.iter_mut().zip(&self.counts[from.index()]) {
                *o = 100.0 * c as f64 / total as f64;
            }
        }
        out
    }

    pub fn percent(&self, from: MigrationState, to: MigrationState) -> f64 {
        self.row_percent(from)[to.index()]
    }

    fn merge(mut self, other: &MigrationMatrix) -> Self {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
        self
    }

    /// Row percentages in the layout of the accumulated-transitions table:
    /// rows MAIN..DEAD then NEW, columns MAIN..DEAD, two decimals.
    pub fn to_percent_csv(&self) -> String {
        self.to_csv(|from, to| format!("{:.2}", self.percent(from, to)))
    }

    pub fn to_count_csv(&self) -> String {
        self.to_csv(|from, to| self.count(from, to).to_string())
    }

    fn to_csv(&self, cell: impl Fn(MigrationState, MigrationState) -> String) -> String {
        let columns = &MigrationState::ALL[..STATE_COUNT - 1];
        let mut out = String::from("from");
        for c in columns {
            out.push(',');
            out.push_str(c.as_str());
        }
        out.push('\n');
        for &from in &MigrationState::ALL {
            out.push_str(from.as_str());
            for &to in columns {
                let _ = write!(out, ",{}", cell(from, to));
            }
            out.push('\n');
        }
        out
    }
}

/// Aggregates every consecutive-year transition of every site, plus one
/// NEW transition into each site's first state.
pub fn migration_counts(timelines: &Timelines) -> MigrationMatrix {
    timelines
        .par_iter()
        .fold(MigrationMatrix::default, |mut m, (_, timeline)| {
            if let Some(&(_, first)) = timeline.first() {
                m.add(MigrationState::New, first, 1);
            }
            for pair in timeline.windows(2) {
                m.add(pair[0].1, pair[1].1, 1);
            }
            m
        })
        .reduce(MigrationMatrix::default, |a, b| a.merge(&b))
}

/// What the percentages of [`top_migrations`] are relative to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// Every counted transition, staying in place included.
    #[default]
    AllTransitions,
    /// Only transitions that change state.
    OffDiagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Migration {
    pub from: MigrationState,
    pub to: MigrationState,
    pub count: u64,
    pub percent: f64,
}

/// The `k` most frequent state changes (`from != to`), most frequent first.
pub fn top_migrations(m: &MigrationMatrix, k: usize, denominator: Denominator) -> Result<Vec<Migration>> {
    if k == 0 {
        return Err(Error::Config("top_migrations needs k >= 1".into()));
    }
    let total = m.total();
    if total == 0 {
        return Err(Error::InsufficientData("migration matrix is empty".into()));
    }
    let off_diagonal: u64 = MigrationState::ALL
        .iter()
        .flat_map(|&a| MigrationState::ALL.iter().map(move |&b| (a, b)))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| m.count(a, b))
        .sum();
    let denom = match denominator {
        Denominator::AllTransitions => total,
        Denominator::OffDiagonal => off_diagonal,
    };
    let mut cells: Vec<Migration> = Vec::new();
    for &from in &MigrationState::ALL {
        for &to in &MigrationState::ALL {
            let count = m.count(from, to);
            if from != to && count > 0 {
                cells.push(Migration {
                    from,
                    to,
                    count,
                    percent: 100.0 * count as f64 / denom as f64,
                });
            }
        }
    }
    cells.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.from.as_str().cmp(b.from.as_str()))
            .then_with(|| a.to.as_str().cmp(b.to.as_str()))
    });
    cells.truncate(k);
    Ok(cells)
}
