//! Cross-snapshot analysis: site timelines, migrations and stable sites.

mod migration;
mod stable;
mod timeline;

pub use migration::{
    migration_counts, top_migrations, Denominator, Migration, MigrationMatrix, MigrationState,
    STATE_COUNT,
};
pub use stable::{
    site_contributions, stable_sites, Characteristic, PresenceRule, StableEntry, StableSiteRanking,
};
pub use timeline::{component_timeline, Timelines};
