use std::fmt::{self, Write};

use crate::model::{Conjunct, LabelAtom, LabelSet, MergedTriple, PathExpr, RelationAtom, SchemaTriple, Ucqt};

fn precedence(e: &PathExpr) -> u8 {
    match e {
        PathExpr::Union(..) => 1,
        PathExpr::Conj(..) => 2,
        PathExpr::Concat(..) | PathExpr::AnnConcat(..) => 3,
        PathExpr::BranchR(..) | PathExpr::BranchL(..) => 4,
        PathExpr::Plus(_) | PathExpr::Repeat(..) => 5,
        PathExpr::Label(_) | PathExpr::Reverse(_) => 6,
    }
}

fn write_labels(f: &mut impl Write, labels: &LabelSet) -> fmt::Result {
    f.write_char('{')?;
    for (i, l) in labels.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        f.write_str(l.as_str())?;
    }
    f.write_char('}')
}

fn write_expr(f: &mut impl Write, e: &PathExpr, min: u8) -> fmt::Result {
    let parens = precedence(e) < min;
    if parens {
        f.write_char('(')?;
    }
    match e {
        PathExpr::Label(l) => f.write_str(l.as_str())?,
        PathExpr::Reverse(l) => write!(f, "-{l}")?,
        PathExpr::Union(a, b) => {
            write_expr(f, a, 1)?;
            f.write_char('|')?;
            write_expr(f, b, 2)?;
        }
        PathExpr::Conj(a, b) => {
            write_expr(f, a, 2)?;
            f.write_char('&')?;
            write_expr(f, b, 3)?;
        }
        PathExpr::Concat(a, b) => {
            write_expr(f, a, 3)?;
            f.write_char('/')?;
            write_expr(f, b, 4)?;
        }
        PathExpr::AnnConcat(a, labels, b) => {
            write_expr(f, a, 3)?;
            f.write_char('/')?;
            write_labels(f, labels)?;
            write_expr(f, b, 4)?;
        }
        PathExpr::BranchR(main, test) => {
            let min_main = if matches!(**main, PathExpr::BranchR(..)) {
                4
            } else {
                5
            };
            write_expr(f, main, min_main)?;
            f.write_char('[')?;
            write_expr(f, test, 1)?;
            f.write_char(']')?;
        }
        PathExpr::BranchL(test, main) => {
            f.write_char('[')?;
            write_expr(f, test, 1)?;
            f.write_char(']')?;
            write_expr(f, main, 4)?;
        }
        PathExpr::Plus(a) => {
            write_expr(f, a, 6)?;
            f.write_char('+')?;
        }
        PathExpr::Repeat(a, m, n) => {
            write_expr(f, a, 6)?;
            write!(f, "{{{m},{n}}}")?;
        }
    }
    if parens {
        f.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

impl fmt::Display for RelationAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.src, self.expr, self.trg)
    }
}

impl fmt::Display for LabelAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.var)?;
        write_labels(f, &self.labels)
    }
}

/// Prints a conjunct: relation atoms first, then label atoms, joined by `&&`.
pub fn print_conjunct(c: &Conjunct) -> String {
    let mut parts: Vec<String> = c.relations.iter().map(ToString::to_string).collect();
    parts.extend(c.labels.iter().map(ToString::to_string));
    parts.join(" && ")
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_conjunct(self))
    }
}

impl fmt::Display for Ucqt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<&str> = self.head().iter().map(|v| v.as_str()).collect();
        if head.is_empty() {
            f.write_str("<- ")?;
        } else {
            write!(f, "{} <- ", head.join(","))?;
        }
        if self.is_empty_union() {
            return f.write_str("false");
        }
        let body: Vec<String> = self.disjuncts().iter().map(print_conjunct).collect();
        f.write_str(&body.join(" || "))
    }
}

impl fmt::Display for SchemaTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.src, self.expr, self.trg)
    }
}

impl fmt::Display for MergedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &LabelSet| {
            let mut out = String::new();
            if s.is_empty() {
                out.push('∅');
            } else {
                write_labels(&mut out, s).expect("writing to a String cannot fail");
            }
            out
        };
        write!(f, "({}, {}, {})", set(&self.src), self.expr, set(&self.trg))
    }
}
