//! Schema-enriched rewriting of UCQT queries.
//!
//! Every relation atom is typed against the schema; its triples are merged,
//! freed from annotations the schema already implies, and translated back
//! into conjuncts. An atom whose typing brings nothing new keeps its
//! (simplified) original form.

mod merge;
mod translate;

use std::fmt::{self, Write};

use serde::Serialize;

pub use merge::{merge_triples, remove_redundant, MergeError};
pub use translate::{query_of, FreshVars};

use crate::infer::{infer_with, InferOptions, InferWarning, Step, DEFAULT_PATH_LIMIT};
use crate::model::{Conjunct, GraphSchema, LabelAtom, MergedTriple, PathExpr, RelationAtom, Ucqt};
use crate::simplify::simplify;
use merge::Endpoints;

/// Default cap on the alternatives a single atom may expand into.
pub const DEFAULT_DISJUNCT_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug)]
pub struct RewriteOptions {
    pub path_limit: usize,
    pub disjunct_limit: usize,
}

impl Default for RewriteOptions {
    fn default() -> Self {
        RewriteOptions {
            path_limit: DEFAULT_PATH_LIMIT,
            disjunct_limit: DEFAULT_DISJUNCT_LIMIT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewriteWarning {
    /// No schema triple fits the atom, so no database conforming to the
    /// schema can satisfy it.
    Unsatisfiable { atom: String },
    /// Label constraints of a rewritten disjunct contradict each other.
    UnsatisfiableDisjunct { disjunct: String },
    /// Closure elimination hit its path limit.
    PathLimit { term: String, limit: usize },
    /// The atom would expand into too many alternatives and was kept as is.
    TooManyAlternatives {
        atom: String,
        count: usize,
        limit: usize,
    },
}

impl fmt::Display for RewriteWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteWarning::Unsatisfiable { atom } => {
                write!(f, "unsatisfiable: no schema triple fits {atom}")
            }
            RewriteWarning::UnsatisfiableDisjunct { disjunct } => {
                write!(
                    f,
                    "unsatisfiable: label constraints of `{disjunct}` are contradictory"
                )
            }
            RewriteWarning::PathLimit { term, limit } => write!(
                f,
                "more than {limit} simple paths for `{term}`; transitive closure kept"
            ),
            RewriteWarning::TooManyAlternatives { atom, count, limit } => write!(
                f,
                "{atom} expands into {count} alternatives (limit {limit}); kept unchanged"
            ),
        }
    }
}

/// What happened to one relation atom.
#[derive(Clone, Debug)]
pub struct AtomReport {
    pub atom: RelationAtom,
    /// The atom's expression after desugaring and simplification.
    pub simplified: PathExpr,
    pub steps: Vec<Step>,
    pub merged: Vec<MergedTriple>,
    /// Merged triples after redundant annotations were removed.
    pub reduced: Vec<MergedTriple>,
    pub reverted: bool,
}

#[derive(Clone, Debug)]
pub struct RewriteOutcome {
    pub enriched: Ucqt,
    /// One flag per relation atom of the input, disjunct by disjunct.
    pub reverted: Vec<bool>,
    pub warnings: Vec<RewriteWarning>,
    pub atoms: Vec<AtomReport>,
}

/// The input query in the form the rewriter compares against: every
/// expression desugared and simplified, disjuncts in canonical order.
pub fn baseline(query: &Ucqt) -> Ucqt {
    query.map_exprs(|e| simplify(&e.desugar())).canonicalize()
}

pub fn rewrite(query: &Ucqt, schema: &GraphSchema) -> RewriteOutcome {
    rewrite_with(query, schema, RewriteOptions::default())
}

enum Alternatives {
    Keep(RelationAtom),
    Replace(Vec<Conjunct>),
    Unsatisfiable,
}

struct Rewriter<'a> {
    schema: &'a GraphSchema,
    options: RewriteOptions,
    endpoints: Endpoints<'a>,
    fresh: FreshVars,
    warnings: Vec<RewriteWarning>,
    reports: Vec<AtomReport>,
}

impl Rewriter<'_> {
    fn atom(&mut self, atom: &RelationAtom) -> Alternatives {
        let simplified = simplify(&atom.expr.desugar());
        let kept = RelationAtom::new(atom.src.clone(), simplified.clone(), atom.trg.clone());
        let inference = infer_with(
            &simplified.left_assoc(),
            self.schema,
            InferOptions {
                path_limit: self.options.path_limit,
            },
        );
        for w in &inference.warnings {
            let InferWarning::PathLimit { term, limit } = w;
            self.warnings.push(RewriteWarning::PathLimit {
                term: term.to_string(),
                limit: *limit,
            });
        }
        let mut report = AtomReport {
            atom: atom.clone(),
            simplified: simplified.clone(),
            steps: inference.steps,
            merged: Vec::new(),
            reduced: Vec::new(),
            reverted: false,
        };

        let merged = match merge_triples(&inference.triples) {
            Ok(m) => m,
            Err(_) => {
                // Cannot happen for inferred triples; keeping the atom is
                // always correct.
                report.reverted = true;
                self.reports.push(report);
                return Alternatives::Keep(kept);
            }
        };
        let reduced: Vec<MergedTriple> = merged
            .iter()
            .map(|m| self.endpoints.remove_redundant(m))
            .collect();
        report.merged = merged;
        report.reduced = reduced.clone();

        let result = if reduced.is_empty() {
            self.warnings.push(RewriteWarning::Unsatisfiable {
                atom: atom.to_string(),
            });
            Alternatives::Unsatisfiable
        } else if reduced.len() > self.options.disjunct_limit {
            self.warnings.push(RewriteWarning::TooManyAlternatives {
                atom: atom.to_string(),
                count: reduced.len(),
                limit: self.options.disjunct_limit,
            });
            report.reverted = true;
            Alternatives::Keep(kept)
        } else if let [only] = reduced.as_slice() {
            if only.src.is_empty() && only.trg.is_empty() && only.expr == simplified.left_assoc() {
                report.reverted = true;
                Alternatives::Keep(kept)
            } else {
                Alternatives::Replace(vec![self.translate(atom, only)])
            }
        } else {
            Alternatives::Replace(reduced.iter().map(|m| self.translate(atom, m)).collect())
        };
        self.reports.push(report);
        result
    }

    fn translate(&mut self, atom: &RelationAtom, m: &MergedTriple) -> Conjunct {
        let mut c = query_of(&atom.src, &atom.trg, &m.expr, &mut self.fresh);
        let mut ends = Vec::new();
        if !m.src.is_empty() {
            ends.push(LabelAtom {
                var: atom.src.clone(),
                labels: m.src.clone(),
            });
        }
        if !m.trg.is_empty() {
            ends.push(LabelAtom {
                var: atom.trg.clone(),
                labels: m.trg.clone(),
            });
        }
        ends.append(&mut c.labels);
        c.labels = ends;
        c
    }
}

/// Rewrites every relation atom of `query` using the schema, distributing
/// the alternatives of each atom over its disjunct.
pub fn rewrite_with(query: &Ucqt, schema: &GraphSchema, options: RewriteOptions) -> RewriteOutcome {
    let mut rw = Rewriter {
        schema,
        options,
        endpoints: Endpoints::new(schema),
        fresh: FreshVars::new(query.all_variables()),
        warnings: Vec::new(),
        reports: Vec::new(),
    };
    let mut reverted = Vec::new();
    let mut disjuncts = Vec::new();

    for d in query.disjuncts() {
        let alts: Vec<Alternatives> = d.relations.iter().map(|r| rw.atom(r)).collect();
        reverted.extend(alts.iter().map(|a| matches!(a, Alternatives::Keep(_))));
        if alts.iter().any(|a| matches!(a, Alternatives::Unsatisfiable)) {
            continue;
        }
        let rewritten = alts.iter().any(|a| matches!(a, Alternatives::Replace(_)));

        let mut partial = vec![Conjunct {
            relations: Vec::new(),
            labels: d.labels.clone(),
        }];
        for alt in &alts {
            let choices: Vec<Conjunct> = match alt {
                Alternatives::Keep(atom) => vec![Conjunct {
                    relations: vec![atom.clone()],
                    labels: Vec::new(),
                }],
                Alternatives::Replace(cs) => cs.clone(),
                Alternatives::Unsatisfiable => unreachable!("filtered above"),
            };
            partial = partial
                .iter()
                .flat_map(|p| {
                    choices.iter().map(move |c| {
                        let mut next = p.clone();
                        next.relations.extend(c.relations.iter().cloned());
                        next.labels.extend(c.labels.iter().cloned());
                        next
                    })
                })
                .collect();
        }

        for c in partial {
            if !rewritten {
                disjuncts.push(c);
                continue;
            }
            match c.merge_label_atoms() {
                Some(c) => disjuncts.push(c),
                None => rw.warnings.push(RewriteWarning::UnsatisfiableDisjunct {
                    disjunct: c.to_string(),
                }),
            }
        }
    }

    let enriched = if disjuncts.is_empty() {
        Ucqt::empty(query.head().to_vec())
    } else {
        Ucqt::new(query.head().to_vec(), disjuncts)
            .expect("rewriting keeps every head variable in every disjunct")
            .canonicalize()
    };
    RewriteOutcome {
        enriched,
        reverted,
        warnings: rw.warnings,
        atoms: rw.reports,
    }
}

fn write_triples<'a, T: fmt::Display + 'a>(
    out: &mut String,
    label: &str,
    triples: impl IntoIterator<Item = &'a T>,
) {
    let mut first = true;
    for t in triples {
        let lead = if first { label } else { "" };
        writeln!(out, "  {lead:<10} {t}").expect("writing to a String cannot fail");
        first = false;
    }
    if first {
        writeln!(out, "  {label:<10} ∅").expect("writing to a String cannot fail");
    }
}

/// A derivation table per atom: every subterm with the rule that typed it
/// and its triples, then the merged and reduced triples.
pub fn format_explain(outcome: &RewriteOutcome) -> String {
    let mut out = String::new();
    for (i, report) in outcome.atoms.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "atom {}", report.atom).expect("writing to a String cannot fail");
        let width = report
            .steps
            .iter()
            .map(|s| s.term.to_string().chars().count())
            .max()
            .unwrap_or(0)
            .max("expression".len());
        writeln!(out, "  {:<width$}  {:<9}  triples", "expression", "rule").expect("infallible");
        for step in &report.steps {
            let term = step.term.to_string();
            let mut first = true;
            for t in &step.triples {
                if first {
                    writeln!(out, "  {term:<width$}  {:<9}  {t}", step.rule.to_string()).expect("infallible");
                } else {
                    writeln!(out, "  {:<width$}  {:<9}  {t}", "", "").expect("infallible");
                }
                first = false;
            }
            if first {
                writeln!(out, "  {term:<width$}  {:<9}  ∅", step.rule.to_string()).expect("infallible");
            }
        }
        write_triples(&mut out, "merged", &report.merged);
        write_triples(&mut out, "reduced", &report.reduced);
        let verdict = if report.reverted {
            "reverted".to_string()
        } else if report.reduced.is_empty() {
            "unsatisfiable".to_string()
        } else {
            format!("rewritten into {} alternative(s)", report.reduced.len())
        };
        writeln!(out, "  {:<10} {verdict}", "result").expect("infallible");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::yago_schema;
    use crate::syntax::parse_ucqt;

    fn enriched(text: &str) -> RewriteOutcome {
        rewrite(&parse_ucqt(text).unwrap(), &yago_schema())
    }

    #[test]
    fn phi4_avoids_the_closure() {
        let out = enriched("x,y <- (x, livesIn/isLocatedIn+/dealsWith+, y)");
        assert_eq!(
            out.enriched.to_string(),
            "x,y <- (x, livesIn/isLocatedIn, _g1) && (_g1, isLocatedIn/dealsWith+, y) && _g1:{REGION}"
        );
        assert_eq!(out.reverted, [false]);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn closure_alone_reverts() {
        let q = parse_ucqt("x,y <- (x, dealsWith+, y)").unwrap();
        let out = rewrite(&q, &yago_schema());
        assert_eq!(out.reverted, [true]);
        assert_eq!(out.enriched.to_string(), baseline(&q).to_string());
    }

    #[test]
    fn unsatisfiable_gives_empty_union() {
        let out = enriched("x,y <- (x, owns/owns, y)");
        assert!(out.enriched.is_empty_union());
        assert_eq!(out.enriched.to_string(), "x,y <- false");
        assert!(matches!(out.warnings[0], RewriteWarning::Unsatisfiable { .. }));
    }

    #[test]
    fn user_label_atoms_are_intersected() {
        let schema = crate::io::load_schema(
            br#"{"nodes": [{"label": "A"}, {"label": "B"}, {"label": "C"}, {"label": "D"}],
                "edges": [{"label": "a", "src": "A", "trg": "B"},
                          {"label": "a", "src": "B", "trg": "B"},
                          {"label": "a", "src": "C", "trg": "D"}]}"#,
        )
        .unwrap();
        let q = parse_ucqt("x,y <- (x, a+, y) && y:{D}").unwrap();
        let out = rewrite(&q, &schema);
        assert_eq!(out.enriched.to_string(), "x,y <- (x, a, y) && y:{D} && x:{C}");
        assert!(matches!(
            out.warnings[0],
            RewriteWarning::UnsatisfiableDisjunct { .. }
        ));
    }

    #[test]
    fn explain_lists_every_subterm() {
        let out = enriched("x,y <- (x, livesIn/isLocatedIn+/dealsWith+, y)");
        let text = format_explain(&out);
        assert!(text.contains("TPlus"));
        assert!(text.contains("reduced    (∅, livesIn/isLocatedIn/{REGION}isLocatedIn/dealsWith+, ∅)"));
    }
}
