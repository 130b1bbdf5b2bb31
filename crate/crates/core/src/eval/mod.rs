//! Reference evaluator for path expressions and UCQT queries, plus a
//! seeded generator of schema-conforming databases.

mod gen;
mod path;
mod ucqt;

pub use gen::gen_db;
pub use path::{eval_path, eval_path_with, pair_ids, EvalOptions, EvalStats, Pairs};
pub use ucqt::{eval_ucqt, eval_ucqt_with, tuple_ids, Tuples};
