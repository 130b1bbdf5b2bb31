//! Typing path expressions against a schema.
//!
//! [`infer`] computes every schema triple `(source label, annotated
//! expression, target label)` a path expression is compatible with. The
//! rules follow the expression structure; transitive closure goes through
//! [`plus_comp`], which unrolls the closure into finitely many annotated
//! paths whenever the triples involved cannot form a cycle.

mod graph;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

pub use graph::{Paths, TripleGraph};

use crate::model::{GraphSchema, Junction, LabelSet, NodeLabel, PathExpr, SchemaTriple};

/// Default cap on the number of simple paths [`plus_comp`] enumerates.
pub const DEFAULT_PATH_LIMIT: usize = 10_000;

pub type TripleSet = BTreeSet<SchemaTriple>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    TBasic,
    TMinus,
    TConcat,
    TUnion,
    TConj,
    TBranchR,
    TBranchL,
    TPlus,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Rule::TBasic => "TBasic",
            Rule::TMinus => "TMinus",
            Rule::TConcat => "TConcat",
            Rule::TUnion => "TUnion",
            Rule::TConj => "TConj",
            Rule::TBranchR => "TBranchR",
            Rule::TBranchL => "TBranchL",
            Rule::TPlus => "TPlus",
        };
        f.write_str(name)
    }
}

/// One line of a derivation: a subterm, the rule that typed it and the
/// triples it received.
#[derive(Clone, Debug)]
pub struct Step {
    pub term: PathExpr,
    pub rule: Rule,
    pub triples: TripleSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InferWarning {
    /// Closure elimination gave up because the triple graph has more simple
    /// paths than allowed; the closure was kept for every connected pair.
    PathLimit { term: PathExpr, limit: usize },
}

impl fmt::Display for InferWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InferWarning::PathLimit { term, limit } => write!(
                f,
                "more than {limit} simple paths for `{term}`; transitive closure kept"
            ),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct InferOptions {
    pub path_limit: usize,
}

impl Default for InferOptions {
    fn default() -> Self {
        InferOptions {
            path_limit: DEFAULT_PATH_LIMIT,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Inference {
    pub triples: TripleSet,
    /// Every subterm in bottom-up order; the last step is the whole term.
    pub steps: Vec<Step>,
    pub warnings: Vec<InferWarning>,
}

/// One triple per schema edge.
pub fn basic_triples(schema: &GraphSchema) -> TripleSet {
    schema
        .edges()
        .iter()
        .map(|e| SchemaTriple::new(e.src.clone(), PathExpr::Label(e.label.clone()), e.trg.clone()))
        .collect()
}

/// The set of triples compatible with `expr` under `schema`.
pub fn infer(expr: &PathExpr, schema: &GraphSchema) -> TripleSet {
    infer_with(expr, schema, InferOptions::default()).triples
}

pub fn infer_with(expr: &PathExpr, schema: &GraphSchema, options: InferOptions) -> Inference {
    let mut cx = Cx {
        basic: basic_triples(schema),
        options,
        steps: Vec::new(),
        warnings: Vec::new(),
    };
    let triples = cx.typ(&expr.desugar());
    Inference {
        triples,
        steps: cx.steps,
        warnings: cx.warnings,
    }
}

/// Concatenates two annotated expressions, annotating the junction with
/// `junction`. The result is a left-nested chain.
fn join_chain(left: &PathExpr, junction: &NodeLabel, right: &PathExpr) -> PathExpr {
    let (mut steps, mut junctions) = left.chain();
    let (rsteps, rjunctions) = right.chain();
    junctions.push(Junction {
        labels: Some(LabelSet::from([junction.clone()])),
    });
    steps.extend(rsteps);
    junctions.extend(rjunctions);
    PathExpr::from_chain(steps.into_iter().cloned().collect(), junctions)
}

struct Cx {
    basic: TripleSet,
    options: InferOptions,
    steps: Vec<Step>,
    warnings: Vec<InferWarning>,
}

impl Cx {
    fn typ(&mut self, e: &PathExpr) -> TripleSet {
        let (rule, triples) = match e {
            PathExpr::Label(l) => (
                Rule::TBasic,
                self.basic
                    .iter()
                    .filter(|t| matches!(&t.expr, PathExpr::Label(x) if x == l))
                    .cloned()
                    .collect(),
            ),
            PathExpr::Reverse(l) => (
                Rule::TMinus,
                self.basic
                    .iter()
                    .filter(|t| matches!(&t.expr, PathExpr::Label(x) if x == l))
                    .map(|t| SchemaTriple::new(t.trg.clone(), PathExpr::Reverse(l.clone()), t.src.clone()))
                    .collect(),
            ),
            PathExpr::Concat(a, b) => (Rule::TConcat, self.concat(a, None, b)),
            PathExpr::AnnConcat(a, labels, b) => (Rule::TConcat, self.concat(a, Some(labels), b)),
            PathExpr::Union(a, b) => {
                let mut out = self.typ(a);
                out.extend(self.typ(b));
                (Rule::TUnion, out)
            }
            PathExpr::Conj(a, b) => {
                let (ta, tb) = (self.typ(a), self.typ(b));
                let mut out = TripleSet::new();
                for x in &ta {
                    for y in tb.iter().filter(|y| y.src == x.src && y.trg == x.trg) {
                        out.insert(SchemaTriple::new(
                            x.src.clone(),
                            PathExpr::conj(x.expr.clone(), y.expr.clone()),
                            x.trg.clone(),
                        ));
                    }
                }
                (Rule::TConj, out)
            }
            PathExpr::BranchR(main, test) => {
                let (tm, tt) = (self.typ(main), self.typ(test));
                let mut out = TripleSet::new();
                for x in &tm {
                    for y in tt.iter().filter(|y| y.src == x.trg) {
                        out.insert(SchemaTriple::new(
                            x.src.clone(),
                            PathExpr::branch_right(x.expr.clone(), y.expr.clone()),
                            x.trg.clone(),
                        ));
                    }
                }
                (Rule::TBranchR, out)
            }
            PathExpr::BranchL(test, main) => {
                let (tt, tm) = (self.typ(test), self.typ(main));
                let mut out = TripleSet::new();
                for y in &tt {
                    for x in tm.iter().filter(|x| x.src == y.src) {
                        out.insert(SchemaTriple::new(
                            x.src.clone(),
                            PathExpr::branch_left(y.expr.clone(), x.expr.clone()),
                            x.trg.clone(),
                        ));
                    }
                }
                (Rule::TBranchL, out)
            }
            PathExpr::Plus(inner) => {
                let inner_triples = self.typ(inner);
                let outcome = plus_comp_with(inner, &inner_triples, self.options.path_limit);
                if outcome.limit_hit {
                    self.warnings.push(InferWarning::PathLimit {
                        term: e.clone(),
                        limit: self.options.path_limit,
                    });
                }
                (Rule::TPlus, outcome.triples)
            }
            PathExpr::Repeat(..) => return self.typ(&e.desugar()),
        };
        self.steps.push(Step {
            term: e.clone(),
            rule,
            triples: triples.clone(),
        });
        triples
    }

    fn concat(&mut self, a: &PathExpr, labels: Option<&LabelSet>, b: &PathExpr) -> TripleSet {
        let (ta, tb) = (self.typ(a), self.typ(b));
        let mut out = TripleSet::new();
        for x in &ta {
            if labels.is_some_and(|l| !l.contains(&x.trg)) {
                continue;
            }
            for y in tb.iter().filter(|y| y.src == x.trg) {
                out.insert(SchemaTriple::new(
                    x.src.clone(),
                    join_chain(&x.expr, &x.trg, &y.expr),
                    y.trg.clone(),
                ));
            }
        }
        out
    }
}

/// Result of [`plus_comp_with`].
pub struct PlusOutcome {
    pub triples: TripleSet,
    /// The path limit was exceeded and the fallback was used.
    pub limit_hit: bool,
}

/// Triples for `expr+` given the triples of `expr`.
///
/// Every simple path of the triple graph yields one triple: the closure
/// itself when the path touches a vertex lying on a cycle, otherwise the
/// annotated concatenation of the path's triples. Each cyclic vertex also
/// gets the closure from itself to itself, which covers pairs joined by a
/// path that returns to its start.
pub fn plus_comp(expr: &PathExpr, triples: &TripleSet) -> TripleSet {
    plus_comp_with(expr, triples, DEFAULT_PATH_LIMIT).triples
}

pub fn plus_comp_with(expr: &PathExpr, triples: &TripleSet, limit: usize) -> PlusOutcome {
    let closure = PathExpr::plus(expr.strip_annotations());
    let graph = TripleGraph::new(triples.iter().cloned());
    let cyclic = graph.cyclic_vertices();
    let arcs = graph.arcs();

    let paths = match graph.simple_paths(limit) {
        Paths::Complete(p) => p,
        Paths::TooMany => {
            let triples = graph
                .reachable_pairs()
                .into_iter()
                .map(|(a, b)| SchemaTriple::new(a, closure.clone(), b))
                .collect();
            return PlusOutcome {
                triples,
                limit_hit: true,
            };
        }
    };

    let mut out = TripleSet::new();
    for path in paths {
        let first = &arcs[path[0]];
        let last = &arcs[*path.last().expect("paths are non-empty")];
        let touches_cycle =
            cyclic.contains(&first.src) || path.iter().any(|&i| cyclic.contains(&arcs[i].trg));
        let expr = if touches_cycle {
            closure.clone()
        } else {
            let mut acc = first.expr.clone();
            for pair in path.windows(2) {
                let (prev, next) = (&arcs[pair[0]], &arcs[pair[1]]);
                acc = join_chain(&acc, &prev.trg, &next.expr);
            }
            acc
        };
        out.insert(SchemaTriple::new(first.src.clone(), expr, last.trg.clone()));
    }
    for v in cyclic {
        out.insert(SchemaTriple::new(v.clone(), closure.clone(), v));
    }
    PlusOutcome {
        triples: out,
        limit_hit: false,
    }
}
