//! Schema-driven rewriting of recursive graph queries.
//!
//! Path expressions over edge labels are typed against a graph schema.
//! The resulting schema triples are merged, stripped of useless
//! annotations and turned back into a UCQT that names the node labels
//! the schema allows, often without the transitive closures of the
//! original. [`rewrite::rewrite`] runs the whole pipeline;
//! [`eval`] holds the reference evaluator used to check equivalence and
//! [`emit`] turns queries into recursive SQL or Cypher.
//!
//! ```
//! use pathforge::{fixtures, rewrite::rewrite, syntax::parse_ucqt};
//!
//! let schema = fixtures::yago_schema();
//! let query = parse_ucqt("x,y <- (x, livesIn/isLocatedIn+/dealsWith+, y)").unwrap();
//! let out = rewrite(&query, &schema);
//! assert_eq!(
//!     out.enriched.to_string(),
//!     "x,y <- (x, livesIn/isLocatedIn, _g1) && (_g1, isLocatedIn/dealsWith+, y) && _g1:{REGION}"
//! );
//! ```

pub mod consistency;
pub mod emit;
mod error;
pub mod eval;
pub mod fixtures;
pub mod infer;
pub mod io;
pub mod model;
pub mod rewrite;
pub mod simplify;
pub mod syntax;

pub use error::{ModelError, ParseError};
pub use model::*;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/syntax.md")]
    mod syntax {}
    #[doc = include_str!("../../../book/src/inference.md")]
    mod inference {}
    #[doc = include_str!("../../../book/src/rewriting.md")]
    mod rewriting {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/emitting.md")]
    mod emitting {}
}
