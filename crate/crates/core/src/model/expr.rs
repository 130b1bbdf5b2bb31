use std::collections::BTreeSet;

use super::label::{EdgeLabel, LabelSet, NodeLabel};

/// A path expression over edge labels.
///
/// The same tree serves for plain and annotated expressions: an annotated
/// expression is simply one that contains [`PathExpr::AnnConcat`] nodes.
/// Use [`PathExpr::is_plain`] to tell them apart.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathExpr {
    /// A single edge label.
    Label(EdgeLabel),
    /// A single edge label traversed backwards.
    Reverse(EdgeLabel),
    Concat(Box<PathExpr>, Box<PathExpr>),
    /// Concatenation whose junction node must carry one of the given labels.
    AnnConcat(Box<PathExpr>, LabelSet, Box<PathExpr>),
    Union(Box<PathExpr>, Box<PathExpr>),
    Conj(Box<PathExpr>, Box<PathExpr>),
    /// `main[test]`: pairs of `main` whose target has an outgoing `test` path.
    BranchR(Box<PathExpr>, Box<PathExpr>),
    /// `[test]main`: pairs of `main` whose source has an outgoing `test` path.
    BranchL(Box<PathExpr>, Box<PathExpr>),
    /// Transitive closure (`e+`).
    Plus(Box<PathExpr>),
    /// Bounded repetition `e{min,max}`; sugar removed by [`PathExpr::desugar`].
    Repeat(Box<PathExpr>, u32, u32),
}

/// One step of a flattened concatenation chain, see [`PathExpr::chain`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Junction {
    /// `None` for a plain `/`, `Some(labels)` for an annotated one.
    pub labels: Option<LabelSet>,
}

impl PathExpr {
    pub fn label(name: impl Into<EdgeLabel>) -> Self {
        PathExpr::Label(name.into())
    }

    pub fn reverse(name: impl Into<EdgeLabel>) -> Self {
        PathExpr::Reverse(name.into())
    }

    pub fn concat(left: PathExpr, right: PathExpr) -> Self {
        PathExpr::Concat(Box::new(left), Box::new(right))
    }

    pub fn ann_concat(left: PathExpr, labels: LabelSet, right: PathExpr) -> Self {
        debug_assert!(!labels.is_empty(), "annotation must name at least one label");
        PathExpr::AnnConcat(Box::new(left), labels, Box::new(right))
    }

    pub fn union(left: PathExpr, right: PathExpr) -> Self {
        PathExpr::Union(Box::new(left), Box::new(right))
    }

    pub fn conj(left: PathExpr, right: PathExpr) -> Self {
        PathExpr::Conj(Box::new(left), Box::new(right))
    }

    pub fn branch_right(main: PathExpr, test: PathExpr) -> Self {
        PathExpr::BranchR(Box::new(main), Box::new(test))
    }

    pub fn branch_left(test: PathExpr, main: PathExpr) -> Self {
        PathExpr::BranchL(Box::new(test), Box::new(main))
    }

    pub fn plus(inner: PathExpr) -> Self {
        PathExpr::Plus(Box::new(inner))
    }

    pub fn repeat(inner: PathExpr, min: u32, max: u32) -> Self {
        PathExpr::Repeat(Box::new(inner), min, max)
    }

    /// True when no annotated concatenation occurs anywhere in the tree.
    pub fn is_plain(&self) -> bool {
        match self {
            PathExpr::Label(_) | PathExpr::Reverse(_) => true,
            PathExpr::AnnConcat(..) => false,
            PathExpr::Concat(a, b)
            | PathExpr::Union(a, b)
            | PathExpr::Conj(a, b)
            | PathExpr::BranchR(a, b)
            | PathExpr::BranchL(a, b) => a.is_plain() && b.is_plain(),
            PathExpr::Plus(a) | PathExpr::Repeat(a, _, _) => a.is_plain(),
        }
    }

    pub fn has_repeat(&self) -> bool {
        self.any(&mut |e| matches!(e, PathExpr::Repeat(..)))
    }

    pub fn has_plus(&self) -> bool {
        self.any(&mut |e| matches!(e, PathExpr::Plus(_)))
    }

    /// Pre-order search over all subexpressions, including `self`.
    pub fn any(&self, pred: &mut impl FnMut(&PathExpr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            PathExpr::Label(_) | PathExpr::Reverse(_) => false,
            PathExpr::Concat(a, b)
            | PathExpr::AnnConcat(a, _, b)
            | PathExpr::Union(a, b)
            | PathExpr::Conj(a, b)
            | PathExpr::BranchR(a, b)
            | PathExpr::BranchL(a, b) => a.any(pred) || b.any(pred),
            PathExpr::Plus(a) | PathExpr::Repeat(a, _, _) => a.any(pred),
        }
    }

    /// Replaces every annotated concatenation by a plain one.
    pub fn strip_annotations(&self) -> PathExpr {
        self.map_children(&|e| e.strip_annotations(), true)
    }

    /// Expands bounded repetition into unions of concatenations:
    /// `e{1,3}` becomes `e | e/e | e/e/e`.
    pub fn desugar(&self) -> PathExpr {
        match self {
            PathExpr::Repeat(inner, min, max) => {
                let inner = inner.desugar();
                let power = |n: u32| {
                    let mut acc = inner.clone();
                    for _ in 1..n {
                        acc = PathExpr::concat(acc, inner.clone());
                    }
                    acc
                };
                let mut acc = power(*min);
                for n in (*min + 1)..=*max {
                    acc = PathExpr::union(acc, power(n));
                }
                acc
            }
            other => other.map_children(&|e| e.desugar(), false),
        }
    }

    /// Rebuilds the node with `f` applied to each direct child. When
    /// `strip` is set, annotated concatenations become plain ones.
    fn map_children(&self, f: &dyn Fn(&PathExpr) -> PathExpr, strip: bool) -> PathExpr {
        let bx = |e: &PathExpr| Box::new(f(e));
        match self {
            PathExpr::Label(_) | PathExpr::Reverse(_) => self.clone(),
            PathExpr::Concat(a, b) => PathExpr::Concat(bx(a), bx(b)),
            PathExpr::AnnConcat(a, _, b) if strip => PathExpr::Concat(bx(a), bx(b)),
            PathExpr::AnnConcat(a, l, b) => PathExpr::AnnConcat(bx(a), l.clone(), bx(b)),
            PathExpr::Union(a, b) => PathExpr::Union(bx(a), bx(b)),
            PathExpr::Conj(a, b) => PathExpr::Conj(bx(a), bx(b)),
            PathExpr::BranchR(a, b) => PathExpr::BranchR(bx(a), bx(b)),
            PathExpr::BranchL(a, b) => PathExpr::BranchL(bx(a), bx(b)),
            PathExpr::Plus(a) => PathExpr::Plus(bx(a)),
            PathExpr::Repeat(a, m, n) => PathExpr::Repeat(bx(a), *m, *n),
        }
    }

    /// Flattens the top-level concatenation chain into its steps and the
    /// junctions between them. `steps.len() == junctions.len() + 1`.
    pub fn chain(&self) -> (Vec<&PathExpr>, Vec<Junction>) {
        let mut steps = Vec::new();
        let mut junctions = Vec::new();
        fn walk<'a>(e: &'a PathExpr, steps: &mut Vec<&'a PathExpr>, js: &mut Vec<Junction>) {
            match e {
                PathExpr::Concat(a, b) => {
                    walk(a, steps, js);
                    js.push(Junction { labels: None });
                    walk(b, steps, js);
                }
                PathExpr::AnnConcat(a, l, b) => {
                    walk(a, steps, js);
                    js.push(Junction {
                        labels: Some(l.clone()),
                    });
                    walk(b, steps, js);
                }
                other => steps.push(other),
            }
        }
        walk(self, &mut steps, &mut junctions);
        (steps, junctions)
    }

    /// Builds a left-nested chain from steps and junctions.
    pub fn from_chain(steps: Vec<PathExpr>, junctions: Vec<Junction>) -> PathExpr {
        assert_eq!(steps.len(), junctions.len() + 1, "malformed chain");
        let mut steps = steps.into_iter();
        let mut acc = steps.next().expect("chain has at least one step");
        for (step, junction) in steps.zip(junctions) {
            acc = match junction.labels {
                Some(labels) => PathExpr::ann_concat(acc, labels, step),
                None => PathExpr::concat(acc, step),
            };
        }
        acc
    }

    /// Re-associates every concatenation chain to the left. Concatenation
    /// (annotated or not) is associative, so the meaning is unchanged.
    pub fn left_assoc(&self) -> PathExpr {
        match self {
            PathExpr::Concat(..) | PathExpr::AnnConcat(..) => {
                let (steps, junctions) = self.chain();
                let steps = steps.into_iter().map(PathExpr::left_assoc).collect();
                PathExpr::from_chain(steps, junctions)
            }
            other => other.map_children(&|e| e.left_assoc(), false),
        }
    }

    /// Edge labels mentioned anywhere in the expression.
    pub fn edge_labels(&self) -> BTreeSet<EdgeLabel> {
        let mut out = BTreeSet::new();
        self.any(&mut |e| {
            if let PathExpr::Label(l) | PathExpr::Reverse(l) = e {
                out.insert(l.clone());
            }
            false
        });
        out
    }

    /// Node labels used in annotations anywhere in the expression.
    pub fn annotation_labels(&self) -> BTreeSet<NodeLabel> {
        let mut out = BTreeSet::new();
        self.any(&mut |e| {
            if let PathExpr::AnnConcat(_, l, _) = e {
                out.extend(l.iter().cloned());
            }
            false
        });
        out
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.any(&mut |_| {
            n += 1;
            false
        });
        n
    }

    /// Height of the tree; a single label has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            PathExpr::Label(_) | PathExpr::Reverse(_) => 1,
            PathExpr::Concat(a, b)
            | PathExpr::AnnConcat(a, _, b)
            | PathExpr::Union(a, b)
            | PathExpr::Conj(a, b)
            | PathExpr::BranchR(a, b)
            | PathExpr::BranchL(a, b) => 1 + a.depth().max(b.depth()),
            PathExpr::Plus(a) | PathExpr::Repeat(a, _, _) => 1 + a.depth(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::label_set;

    fn a() -> PathExpr {
        PathExpr::label("a")
    }

    #[test]
    fn desugar_single_repetition_is_the_operand() {
        assert_eq!(PathExpr::repeat(a(), 1, 1).desugar(), a());
    }

    #[test]
    fn desugar_one_to_two() {
        let expected = PathExpr::union(a(), PathExpr::concat(a(), a()));
        assert_eq!(PathExpr::repeat(a(), 1, 2).desugar(), expected);
    }

    #[test]
    fn desugar_two_to_three() {
        let aa = PathExpr::concat(a(), a());
        let aaa = PathExpr::concat(aa.clone(), a());
        assert_eq!(PathExpr::repeat(a(), 2, 3).desugar(), PathExpr::union(aa, aaa));
    }

    #[test]
    fn desugar_reaches_nested_repeats() {
        let e = PathExpr::plus(PathExpr::repeat(PathExpr::repeat(a(), 1, 2), 2, 2));
        let d = e.desugar();
        assert!(!d.has_repeat());
    }

    #[test]
    fn left_assoc_rotates_right_nested_chains() {
        let b = PathExpr::label("b");
        let c = PathExpr::label("c");
        let right = PathExpr::ann_concat(
            a(),
            label_set(["X"]),
            PathExpr::ann_concat(b.clone(), label_set(["Y"]), c.clone()),
        );
        let left = PathExpr::ann_concat(
            PathExpr::ann_concat(a(), label_set(["X"]), b),
            label_set(["Y"]),
            c,
        );
        assert_eq!(right.left_assoc(), left);
        assert_eq!(left.left_assoc(), left);
    }

    #[test]
    fn strip_keeps_structure() {
        let e = PathExpr::ann_concat(a(), label_set(["X"]), PathExpr::plus(a()));
        assert!(!e.is_plain());
        assert_eq!(e.strip_annotations(), PathExpr::concat(a(), PathExpr::plus(a())));
    }
}
