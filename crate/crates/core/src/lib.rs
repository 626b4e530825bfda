//! Analysis toolkit for sequences of national-web crawl snapshots.
//!
//! A snapshot is one crawl year: a table of sites (hostname, crawl status,
//! page count, content bytes) plus the site-level link table. The crate
//! rebuilds the hostgraph of each year, splits it into the bow-tie
//! components, fits power laws and exponential growth to the yearly
//! characteristics, and follows every site's component across years to
//! count migrations and rank the most stable sites.
//!
//! Modules mirror the pipeline:
//!
//! - [`snapshot`]: data model, TSV parsing and per-year statistics.
//! - [`graph`]: hostgraph, strongly connected components, bow-tie split.
//! - [`metrics`]: histograms, power-law and growth fits, accumulation
//!   curves and PageRank.
//! - [`dynamics`]: per-site timelines, migration matrices, stable sites.
//! - [`synthgen`]: seeded generator of calibrated synthetic series.
//! - [`report`]: the end-to-end pipeline behind the `webdyn` binary.

pub mod dynamics;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod report;
pub mod snapshot;
pub mod synthgen;

pub use error::{Error, Result};
