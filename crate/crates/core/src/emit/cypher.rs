use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::model::{LabelSet, PathExpr, Ucqt, Var};

/// Why a query has no Cypher translation: the first construct outside the
/// chain-shaped fragment, where it was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnsupportedReport {
    pub construct: String,
    /// Position of the disjunct, starting at 1.
    pub disjunct: usize,
    pub atom: String,
}

impl fmt::Display for UnsupportedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cypher: {} is not supported (disjunct {}, atom {})",
            self.construct, self.disjunct, self.atom
        )
    }
}

fn labels_text(labels: &LabelSet) -> String {
    let names: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
    format!(":{}", names.join("|"))
}

/// Labels of a union of plain edge labels, or `None`.
fn label_union(e: &PathExpr, out: &mut Vec<String>) -> bool {
    match e {
        PathExpr::Label(l) => {
            out.push(l.to_string());
            true
        }
        PathExpr::Union(a, b) => label_union(a, out) && label_union(b, out),
        _ => false,
    }
}

fn unsupported(e: &PathExpr) -> String {
    match e {
        PathExpr::Conj(..) => "conjunction".into(),
        PathExpr::BranchR(..) | PathExpr::BranchL(..) => "branch".into(),
        PathExpr::Plus(_) => format!("transitive closure over `{e}`"),
        PathExpr::Repeat(..) => format!("bounded repetition over `{e}`"),
        PathExpr::Union(..) => format!("union of compound paths `{e}`"),
        _ => format!("`{e}`"),
    }
}

/// One relationship pattern, such as `-[:a*1..]->`.
fn relationship(e: &PathExpr) -> Result<String, String> {
    let (labels, reverse, range) = match e {
        PathExpr::Label(l) => (l.to_string(), false, String::new()),
        PathExpr::Reverse(l) => (l.to_string(), true, String::new()),
        PathExpr::Plus(inner) | PathExpr::Repeat(inner, ..) => {
            let range = match e {
                PathExpr::Repeat(_, m, n) => format!("*{m}..{n}"),
                _ => "*1..".to_string(),
            };
            match &**inner {
                PathExpr::Label(l) => (l.to_string(), false, range),
                PathExpr::Reverse(l) => (l.to_string(), true, range),
                other => {
                    let mut names = Vec::new();
                    if !label_union(other, &mut names) {
                        return Err(unsupported(e));
                    }
                    (names.join("|"), false, range)
                }
            }
        }
        PathExpr::Union(..) => {
            let mut names = Vec::new();
            if !label_union(e, &mut names) {
                return Err(unsupported(e));
            }
            (names.join("|"), false, String::new())
        }
        other => return Err(unsupported(other)),
    };
    Ok(if reverse {
        format!("<-[:{labels}{range}]-")
    } else {
        format!("-[:{labels}{range}]->")
    })
}

/// Cypher for the chain-shaped fragment: every atom a concatenation of edge
/// labels, reversed labels, label unions and closures of those. Annotated
/// junctions and label atoms become node labels.
pub fn emit_cypher(query: &Ucqt) -> Result<String, UnsupportedReport> {
    let head: Vec<&str> = query.head().iter().map(|v| v.as_str()).collect();
    let ret = if head.is_empty() {
        "RETURN DISTINCT true AS sat".to_string()
    } else {
        format!("RETURN DISTINCT {}", head.join(", "))
    };
    let mut blocks = Vec::new();
    for (i, d) in query.disjuncts().iter().enumerate() {
        let Some(d) = d.merge_label_atoms() else {
            continue;
        };
        let mut seen: BTreeSet<Var> = BTreeSet::new();
        let node = |v: &Var, seen: &mut BTreeSet<Var>| {
            if !seen.insert(v.clone()) {
                return format!("({v})");
            }
            match d.label_constraint(v) {
                Some(l) => format!("({v}{})", labels_text(&l)),
                None => format!("({v})"),
            }
        };
        let mut patterns = Vec::new();
        for r in &d.relations {
            let (steps, junctions) = r.expr.chain();
            let mut p = node(&r.src, &mut seen);
            for (k, step) in steps.iter().enumerate() {
                if k > 0 {
                    match &junctions[k - 1].labels {
                        Some(l) => p.push_str(&format!("({})", labels_text(l))),
                        None => p.push_str("()"),
                    }
                }
                let rel = relationship(step).map_err(|construct| UnsupportedReport {
                    construct,
                    disjunct: i + 1,
                    atom: r.to_string(),
                })?;
                p.push_str(&rel);
            }
            p.push_str(&node(&r.trg, &mut seen));
            patterns.push(p);
        }
        for l in &d.labels {
            if !seen.contains(&l.var) {
                patterns.push(node(&l.var, &mut seen));
            }
        }
        blocks.push(format!("MATCH {}\n{ret}", patterns.join(", ")));
    }
    if blocks.is_empty() {
        let vars: Vec<String> = if head.is_empty() {
            vec!["()".into()]
        } else {
            head.iter().map(|h| format!("({h})")).collect()
        };
        return Ok(format!("MATCH {} WHERE false\n{ret};\n", vars.join(", ")));
    }
    Ok(format!("{};\n", blocks.join("\nUNION\n")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_ucqt;

    fn cy(q: &str) -> Result<String, UnsupportedReport> {
        emit_cypher(&parse_ucqt(q).unwrap())
    }

    #[test]
    fn closures_and_reverse() {
        assert_eq!(
            cy("x,y <- (x, -a/b+/c{2,3}, y)").unwrap(),
            "MATCH (x)<-[:a]-()-[:b*1..]->()-[:c*2..3]->(y)\nRETURN DISTINCT x, y;\n"
        );
    }

    #[test]
    fn label_atoms_land_on_first_occurrence() {
        assert_eq!(
            cy("x,y <- (x, a, g) && (g, b|c, y) && g:{R} && z:{Q}").unwrap(),
            "MATCH (x)-[:a]->(g:R), (g)-[:b|c]->(y), (z:Q)\nRETURN DISTINCT x, y;\n"
        );
    }

    #[test]
    fn unions_of_disjuncts() {
        assert_eq!(
            cy("x <- (x, a, y) || (x, b, y)").unwrap(),
            "MATCH (x)-[:a]->(y)\nRETURN DISTINCT x\nUNION\nMATCH (x)-[:b]->(y)\nRETURN DISTINCT x;\n"
        );
    }

    #[test]
    fn conjunction_and_branch_are_reported() {
        let r = cy("x,y <- (x, a&b, y)").unwrap_err();
        assert_eq!(r.construct, "conjunction");
        assert_eq!((r.disjunct, r.atom.as_str()), (1, "(x, a&b, y)"));
        assert_eq!(
            cy("x,y <- (x, c, y) || (x, a[b], y)").unwrap_err().construct,
            "branch"
        );
        assert!(cy("x,y <- (x, (a/b)+, y)")
            .unwrap_err()
            .construct
            .starts_with("transitive closure"));
    }

    #[test]
    fn empty_union() {
        assert_eq!(
            cy("x,y <- false").unwrap(),
            "MATCH (x), (y) WHERE false\nRETURN DISTINCT x, y;\n"
        );
    }
}
