use std::collections::BTreeSet;

use super::expr::PathExpr;
use super::label::{is_identifier, LabelSet, Var};
use crate::error::ModelError;

/// `(src, expr, trg)`: the pair bound to `src`/`trg` must be in the
/// evaluation of `expr`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationAtom {
    pub src: Var,
    pub expr: PathExpr,
    pub trg: Var,
}

impl RelationAtom {
    pub fn new(src: impl Into<Var>, expr: PathExpr, trg: impl Into<Var>) -> Self {
        RelationAtom {
            src: src.into(),
            expr,
            trg: trg.into(),
        }
    }
}

/// `var:{L1,L2}`: the node bound to `var` carries one of the labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelAtom {
    pub var: Var,
    pub labels: LabelSet,
}

/// One conjunctive query: relation atoms and label atoms. Body variables
/// are the variables that are not in the head.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conjunct {
    pub relations: Vec<RelationAtom>,
    pub labels: Vec<LabelAtom>,
}

impl Conjunct {
    /// Every variable, in order of first appearance.
    pub fn variables(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |v: &Var| {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        };
        for r in &self.relations {
            push(&r.src);
            push(&r.trg);
        }
        for l in &self.labels {
            push(&l.var);
        }
        out
    }

    pub fn body_vars(&self, head: &[Var]) -> BTreeSet<Var> {
        self.variables()
            .into_iter()
            .filter(|v| !head.contains(v))
            .collect()
    }

    /// Intersection of every label atom on `var`; `None` if there is none.
    pub fn label_constraint(&self, var: &Var) -> Option<LabelSet> {
        self.labels
            .iter()
            .filter(|a| &a.var == var)
            .map(|a| a.labels.clone())
            .reduce(|acc, l| acc.intersection(&l).cloned().collect())
    }

    /// Folds all label atoms on one variable into a single atom (their
    /// intersection), keeping first-appearance order. Returns `None` when
    /// some intersection is empty, i.e. the conjunct is unsatisfiable.
    pub fn merge_label_atoms(&self) -> Option<Conjunct> {
        let mut labels: Vec<LabelAtom> = Vec::new();
        for atom in &self.labels {
            match labels.iter_mut().find(|a| a.var == atom.var) {
                Some(existing) => {
                    existing.labels = existing.labels.intersection(&atom.labels).cloned().collect();
                }
                None => labels.push(atom.clone()),
            }
        }
        if labels.iter().any(|a| a.labels.is_empty()) {
            return None;
        }
        Some(Conjunct {
            relations: self.relations.clone(),
            labels,
        })
    }
}

/// A union of conjunctive queries over path expressions, all sharing the
/// same head. An empty disjunct list is the empty union (always false).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ucqt {
    head: Vec<Var>,
    disjuncts: Vec<Conjunct>,
}

impl Ucqt {
    /// Validates and builds a query. Every head variable has to occur in
    /// every disjunct, variables must be identifiers and label atoms must
    /// name at least one label.
    pub fn new(head: Vec<Var>, disjuncts: Vec<Conjunct>) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for v in &head {
            if !is_identifier(v.as_str()) {
                return Err(ModelError::InvalidIdentifier(v.to_string()));
            }
            if !seen.insert(v) {
                return Err(ModelError::InvalidQuery(format!(
                    "head variable `{v}` is listed twice"
                )));
            }
        }
        for (i, d) in disjuncts.iter().enumerate() {
            let vars = d.variables();
            for v in &vars {
                if !is_identifier(v.as_str()) {
                    return Err(ModelError::InvalidIdentifier(v.to_string()));
                }
            }
            for h in &head {
                if !vars.contains(h) {
                    return Err(ModelError::InvalidQuery(format!(
                        "head variable `{h}` does not occur in disjunct {}",
                        i + 1
                    )));
                }
            }
            if let Some(a) = d.labels.iter().find(|a| a.labels.is_empty()) {
                return Err(ModelError::InvalidQuery(format!(
                    "label atom on `{}` names no label",
                    a.var
                )));
            }
            if d.relations.is_empty() && d.labels.is_empty() {
                return Err(ModelError::InvalidQuery(format!(
                    "disjunct {} has no atoms",
                    i + 1
                )));
            }
        }
        Ok(Ucqt { head, disjuncts })
    }

    /// The empty union over `head`.
    pub fn empty(head: Vec<Var>) -> Self {
        Ucqt {
            head,
            disjuncts: Vec::new(),
        }
    }

    /// Convenience for the common one-atom query `x,y <- (x, expr, y)`.
    pub fn single(src: &str, expr: PathExpr, trg: &str) -> Self {
        let head = if src == trg {
            vec![Var::new(src)]
        } else {
            vec![Var::new(src), Var::new(trg)]
        };
        Ucqt::new(
            head,
            vec![Conjunct {
                relations: vec![RelationAtom::new(src, expr, trg)],
                labels: vec![],
            }],
        )
        .expect("single-atom query is well formed")
    }

    pub fn head(&self) -> &[Var] {
        &self.head
    }

    pub fn disjuncts(&self) -> &[Conjunct] {
        &self.disjuncts
    }

    pub fn is_empty_union(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// Applies `f` to every relation atom's expression.
    pub fn map_exprs(&self, mut f: impl FnMut(&PathExpr) -> PathExpr) -> Ucqt {
        let disjuncts = self
            .disjuncts
            .iter()
            .map(|d| Conjunct {
                relations: d
                    .relations
                    .iter()
                    .map(|r| RelationAtom {
                        src: r.src.clone(),
                        expr: f(&r.expr),
                        trg: r.trg.clone(),
                    })
                    .collect(),
                labels: d.labels.clone(),
            })
            .collect();
        Ucqt {
            head: self.head.clone(),
            disjuncts,
        }
    }

    /// Sorts disjuncts by their printed form and drops duplicates.
    pub fn canonicalize(&self) -> Ucqt {
        let mut keyed: Vec<(String, Conjunct)> = self
            .disjuncts
            .iter()
            .map(|d| (crate::syntax::print_conjunct(d), d.clone()))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        Ucqt {
            head: self.head.clone(),
            disjuncts: keyed.into_iter().map(|(_, d)| d).collect(),
        }
    }

    /// Every variable used anywhere in the query.
    pub fn all_variables(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.head.iter().cloned().collect();
        for d in &self.disjuncts {
            out.extend(d.variables());
        }
        out
    }
}
