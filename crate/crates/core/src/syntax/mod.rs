//! Concrete text syntax for path expressions and UCQT queries.

mod lexer;
mod parser;
mod printer;

pub use parser::{parse_path_expr, parse_ucqt};
pub use printer::print_conjunct;
