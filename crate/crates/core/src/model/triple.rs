use std::cmp::Ordering;

use super::expr::PathExpr;
use super::label::{LabelSet, NodeLabel};

/// A compatibility fact `(source label, annotated expression, target label)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchemaTriple {
    pub src: NodeLabel,
    pub expr: PathExpr,
    pub trg: NodeLabel,
}

impl SchemaTriple {
    pub fn new(src: impl Into<NodeLabel>, expr: PathExpr, trg: impl Into<NodeLabel>) -> Self {
        SchemaTriple {
            src: src.into(),
            expr,
            trg: trg.into(),
        }
    }

    pub fn src(&self) -> &NodeLabel {
        &self.src
    }

    pub fn expr(&self) -> &PathExpr {
        &self.expr
    }

    pub fn trg(&self) -> &NodeLabel {
        &self.trg
    }

    fn key(&self) -> (&NodeLabel, String, &NodeLabel) {
        (&self.src, self.expr.to_string(), &self.trg)
    }
}

// Canonical order: source label, printed expression, target label.
impl Ord for SchemaTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key()
            .cmp(&other.key())
            .then_with(|| self.expr.cmp(&other.expr))
    }
}

impl PartialOrd for SchemaTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Several triples sharing one underlying plain expression, with their
/// labels merged into sets. An empty endpoint set means "unconstrained".
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MergedTriple {
    pub src: LabelSet,
    pub expr: PathExpr,
    pub trg: LabelSet,
}

impl MergedTriple {
    fn key(&self) -> (String, &LabelSet, &LabelSet) {
        (self.expr.to_string(), &self.src, &self.trg)
    }
}

impl Ord for MergedTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key()
            .cmp(&other.key())
            .then_with(|| self.expr.cmp(&other.expr))
    }
}

impl PartialOrd for MergedTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
