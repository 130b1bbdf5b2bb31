//! Query emitters: recursive SQL over a relational encoding of the graph,
//! and Cypher for chain-shaped queries.

mod cypher;
mod plan;
mod sql;

pub use cypher::{emit_cypher, UnsupportedReport};
pub use plan::run_plan;
pub use sql::{
    emit_sql, render_sql, sql_plan, Col, Cond, Cte, Dialect, Item, Query, Select, Source, SqlPlan, Value,
};
