use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::infer::infer;
use crate::model::{GraphSchema, Junction, LabelSet, MergedTriple, PathExpr, SchemaTriple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("triples `{left}` and `{right}` share a plain expression but differ in shape")]
pub struct MergeError {
    pub left: String,
    pub right: String,
}

/// Lays two annotated expressions with the same plain form on top of each
/// other, uniting the annotation sets found at the same position. A
/// junction annotated on one side only ends up unconstrained.
fn overlay(a: &PathExpr, b: &PathExpr) -> Option<PathExpr> {
    use PathExpr::*;
    let two = |x1, y1, x2, y2| Some((overlay(x1, x2)?, overlay(y1, y2)?));
    Some(match (a, b) {
        (Label(x), Label(y)) if x == y => a.clone(),
        (Reverse(x), Reverse(y)) if x == y => a.clone(),
        (AnnConcat(x1, l1, y1), AnnConcat(x2, l2, y2)) => {
            let (x, y) = two(x1, y1, x2, y2)?;
            PathExpr::ann_concat(x, l1 | l2, y)
        }
        (Concat(x1, y1) | AnnConcat(x1, _, y1), Concat(x2, y2) | AnnConcat(x2, _, y2)) => {
            let (x, y) = two(x1, y1, x2, y2)?;
            PathExpr::concat(x, y)
        }
        (Union(x1, y1), Union(x2, y2)) => {
            let (x, y) = two(x1, y1, x2, y2)?;
            PathExpr::union(x, y)
        }
        (Conj(x1, y1), Conj(x2, y2)) => {
            let (x, y) = two(x1, y1, x2, y2)?;
            PathExpr::conj(x, y)
        }
        (BranchR(x1, y1), BranchR(x2, y2)) => {
            let (x, y) = two(x1, y1, x2, y2)?;
            PathExpr::branch_right(x, y)
        }
        (BranchL(x1, y1), BranchL(x2, y2)) => {
            let (x, y) = two(x1, y1, x2, y2)?;
            PathExpr::branch_left(x, y)
        }
        (Plus(x), Plus(y)) => PathExpr::plus(overlay(x, y)?),
        (Repeat(x, m1, n1), Repeat(y, m2, n2)) if m1 == m2 && n1 == n2 => {
            PathExpr::repeat(overlay(x, y)?, *m1, *n1)
        }
        _ => return None,
    })
}

/// Groups triples by their plain expression. Each group becomes one merged
/// triple whose endpoint sets are the unions of the group's endpoint labels
/// and whose annotations are the unions of the labels at each position.
pub fn merge_triples<'a>(
    triples: impl IntoIterator<Item = &'a SchemaTriple>,
) -> Result<Vec<MergedTriple>, MergeError> {
    let mut classes: BTreeMap<PathExpr, MergedTriple> = BTreeMap::new();
    for t in triples {
        let key = t.expr.strip_annotations();
        match classes.get_mut(&key) {
            None => {
                classes.insert(
                    key,
                    MergedTriple {
                        src: LabelSet::from([t.src.clone()]),
                        expr: t.expr.clone(),
                        trg: LabelSet::from([t.trg.clone()]),
                    },
                );
            }
            Some(m) => {
                m.expr = overlay(&m.expr, &t.expr).ok_or_else(|| MergeError {
                    left: m.expr.to_string(),
                    right: t.expr.to_string(),
                })?;
                m.src.insert(t.src.clone());
                m.trg.insert(t.trg.clone());
            }
        }
    }
    let mut out: Vec<MergedTriple> = classes.into_values().collect();
    out.sort();
    Ok(out)
}

/// Source and target labels the schema allows for plain expressions.
pub(crate) struct Endpoints<'a> {
    schema: &'a GraphSchema,
    memo: BTreeMap<PathExpr, (LabelSet, LabelSet)>,
}

impl<'a> Endpoints<'a> {
    pub(crate) fn new(schema: &'a GraphSchema) -> Self {
        Endpoints {
            schema,
            memo: BTreeMap::new(),
        }
    }

    fn of(&mut self, e: &PathExpr) -> &(LabelSet, LabelSet) {
        let plain = e.strip_annotations();
        if !self.memo.contains_key(&plain) {
            let triples = infer(&plain, self.schema);
            let src: BTreeSet<_> = triples.iter().map(|t| t.src.clone()).collect();
            let trg: BTreeSet<_> = triples.iter().map(|t| t.trg.clone()).collect();
            self.memo.insert(plain.clone(), (src, trg));
        }
        &self.memo[&plain]
    }

    fn reduce(&mut self, e: &PathExpr) -> PathExpr {
        match e {
            PathExpr::Concat(..) | PathExpr::AnnConcat(..) => {
                let (steps, junctions) = e.chain();
                let mut kept = Vec::with_capacity(junctions.len());
                for (i, j) in junctions.into_iter().enumerate() {
                    let labels = j.labels.filter(|l| {
                        let covers_left = self.of(steps[i]).1.is_subset(l);
                        let covers_right = self.of(steps[i + 1]).0.is_subset(l);
                        !(covers_left || covers_right)
                    });
                    kept.push(Junction { labels });
                }
                let steps = steps.into_iter().map(|s| self.reduce(s)).collect();
                PathExpr::from_chain(steps, kept)
            }
            PathExpr::Label(_) | PathExpr::Reverse(_) => e.clone(),
            PathExpr::Union(a, b) => PathExpr::union(self.reduce(a), self.reduce(b)),
            PathExpr::Conj(a, b) => PathExpr::conj(self.reduce(a), self.reduce(b)),
            PathExpr::BranchR(a, b) => PathExpr::branch_right(self.reduce(a), self.reduce(b)),
            PathExpr::BranchL(a, b) => PathExpr::branch_left(self.reduce(a), self.reduce(b)),
            PathExpr::Plus(a) => PathExpr::plus(self.reduce(a)),
            PathExpr::Repeat(a, m, n) => PathExpr::repeat(self.reduce(a), *m, *n),
        }
    }

    pub(crate) fn remove_redundant(&mut self, mt: &MergedTriple) -> MergedTriple {
        let (all_src, all_trg) = self.of(&mt.expr).clone();
        let keep = |set: &LabelSet, all: &LabelSet| {
            if all.is_subset(set) {
                LabelSet::new()
            } else {
                set.clone()
            }
        };
        MergedTriple {
            src: keep(&mt.src, &all_src),
            expr: self.reduce(&mt.expr),
            trg: keep(&mt.trg, &all_trg),
        }
    }
}

/// Drops annotations that the schema already implies.
///
/// A junction annotation goes when it lists every label the schema allows
/// at the end of the step before it, or every label allowed at the start
/// of the step after it. An endpoint set is emptied when it lists every
/// label the plain expression can start (or end) at.
pub fn remove_redundant(mt: &MergedTriple, schema: &GraphSchema) -> MergedTriple {
    Endpoints::new(schema).remove_redundant(mt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::yago_schema;
    use crate::infer::infer;
    use crate::syntax::parse_path_expr;

    fn t(src: &str, e: &str, trg: &str) -> SchemaTriple {
        SchemaTriple::new(src, parse_path_expr(e).unwrap(), trg)
    }

    #[test]
    fn merges_positionwise() {
        let m = merge_triples(&[t("m", "a+/{n}b/{l}d", "p"), t("m", "a+/{q}b/{r}d", "l")]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].to_string(), "({m}, a+/{n,q}b/{l,r}d, {l,p})");
    }

    #[test]
    fn singleton_and_partition() {
        let m = merge_triples(&[t("A", "a", "B")]).unwrap();
        assert_eq!(m[0].to_string(), "({A}, a, {B})");
        let m = merge_triples(&[t("A", "a", "B"), t("A", "b", "B")]).unwrap();
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn plain_triple_is_untouched() {
        let mt = MergedTriple {
            src: LabelSet::new(),
            expr: parse_path_expr("livesIn").unwrap(),
            trg: LabelSet::new(),
        };
        assert_eq!(remove_redundant(&mt, &yago_schema()), mt);
    }

    #[test]
    fn only_region_survives() {
        let s = yago_schema();
        let e = parse_path_expr("livesIn/isLocatedIn+/dealsWith+").unwrap();
        let m = merge_triples(&infer(&e, &s)).unwrap();
        assert_eq!(m.len(), 1);
        let r = remove_redundant(&m[0], &s);
        assert_eq!(
            r.to_string(),
            "(∅, livesIn/isLocatedIn/{REGION}isLocatedIn/dealsWith+, ∅)"
        );
    }
}
