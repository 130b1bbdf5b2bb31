//! The small YAGO schema and database used throughout the documentation
//! and tests, plus a trimmed LDBC social-network schema.

use crate::io::{load_db, load_schema};
use crate::model::{GraphDb, GraphSchema};

pub const YAGO_SCHEMA_JSON: &str = include_str!("../data/yago/schema.json");
pub const YAGO_NODES_CSV: &str = include_str!("../data/yago/nodes.csv");
pub const YAGO_EDGES_CSV: &str = include_str!("../data/yago/edges.csv");
pub const LDBC_SCHEMA_JSON: &str = include_str!("../data/ldbc/schema.json");

/// Five node labels, seven edges: people own properties and live in
/// cities, which sit in regions, which sit in countries.
pub fn yago_schema() -> GraphSchema {
    load_schema(YAGO_SCHEMA_JSON.as_bytes()).expect("bundled YAGO schema is valid")
}

/// Seven nodes and nine edges conforming to [`yago_schema`].
pub fn yago_db() -> GraphDb {
    load_db(YAGO_NODES_CSV.as_bytes(), YAGO_EDGES_CSV.as_bytes()).expect("bundled YAGO database is valid")
}

pub fn ldbc_schema() -> GraphSchema {
    load_schema(LDBC_SCHEMA_JSON.as_bytes()).expect("bundled LDBC schema is valid")
}
