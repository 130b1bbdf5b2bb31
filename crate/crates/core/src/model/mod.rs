//! Domain types: labels, path expressions, schemas, databases, triples and
//! UCQT queries.

mod db;
mod expr;
mod label;
mod query;
mod schema;
mod triple;

pub use db::{DbEdge, DbNode, GraphDb, Value};
pub use expr::{Junction, PathExpr};
pub use label::{is_identifier, label_set, EdgeLabel, LabelSet, NodeLabel, Var};
pub use query::{Conjunct, LabelAtom, RelationAtom, Ucqt};
pub use schema::{DataType, GraphSchema, SchemaEdge, SchemaNode};
pub use triple::{MergedTriple, SchemaTriple};
