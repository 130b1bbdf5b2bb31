//! Schema-independent simplification rules, applied until none fires:
//!
//! * R1 `(p+)+` → `p+`
//! * R2 `p[q+]` → `p[q]`
//! * R3 `p[q/r]` → `p[q[r]]`
//! * R4 `[q+]p` → `[q]p`
//! * R5 `[q/r]p` → `[q[r]]p`
//!
//! A test only asks whether some path leaves a node, and `q+` leaves a node
//! exactly when `q` does, so R2 and R4 hold whatever the main expression.
//! Children are normalised before their parent, and R3/R5 split a test
//! chain after its first step, so `p[a/b/c]` ends up as `p[a[b[c]]]`.

use crate::model::{Junction, PathExpr};

pub fn simplify(expr: &PathExpr) -> PathExpr {
    let node = match expr {
        PathExpr::Label(_) | PathExpr::Reverse(_) => return expr.clone(),
        PathExpr::Concat(a, b) => PathExpr::concat(simplify(a), simplify(b)),
        PathExpr::AnnConcat(a, l, b) => PathExpr::ann_concat(simplify(a), l.clone(), simplify(b)),
        PathExpr::Union(a, b) => PathExpr::union(simplify(a), simplify(b)),
        PathExpr::Conj(a, b) => PathExpr::conj(simplify(a), simplify(b)),
        PathExpr::BranchR(a, b) => PathExpr::branch_right(simplify(a), simplify(b)),
        PathExpr::BranchL(a, b) => PathExpr::branch_left(simplify(a), simplify(b)),
        PathExpr::Plus(a) => PathExpr::plus(simplify(a)),
        PathExpr::Repeat(a, m, n) => PathExpr::repeat(simplify(a), *m, *n),
    };
    match rewrite_root(&node) {
        Some(next) => simplify(&next),
        None => node,
    }
}

/// Splits a plain concatenation chain into its first step and the rest.
fn split_first(e: &PathExpr) -> Option<(PathExpr, PathExpr)> {
    if !matches!(e, PathExpr::Concat(..)) {
        return None;
    }
    let (steps, junctions) = e.chain();
    if junctions.iter().any(|j| j.labels.is_some()) {
        return None;
    }
    let first = steps[0].clone();
    let rest: Vec<PathExpr> = steps[1..].iter().map(|s| (*s).clone()).collect();
    let rest_junctions = vec![Junction { labels: None }; rest.len() - 1];
    Some((first, PathExpr::from_chain(rest, rest_junctions)))
}

fn rewrite_root(e: &PathExpr) -> Option<PathExpr> {
    match e {
        // R1
        PathExpr::Plus(inner) if matches!(**inner, PathExpr::Plus(_)) => Some((**inner).clone()),
        PathExpr::BranchR(main, test) => match (&**main, &**test) {
            // R2
            (_, PathExpr::Plus(q)) => Some(PathExpr::branch_right((**main).clone(), (**q).clone())),
            // R3
            _ => split_first(test)
                .map(|(q, r)| PathExpr::branch_right((**main).clone(), PathExpr::branch_right(q, r))),
        },
        PathExpr::BranchL(test, main) => match (&**test, &**main) {
            // R4
            (PathExpr::Plus(q), _) => Some(PathExpr::branch_left((**q).clone(), (**main).clone())),
            // R5
            _ => split_first(test)
                .map(|(q, r)| PathExpr::branch_left(PathExpr::branch_right(q, r), (**main).clone())),
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_path_expr;

    fn s(text: &str) -> String {
        simplify(&parse_path_expr(text).unwrap()).to_string()
    }

    #[test]
    fn nested_plus_collapses() {
        assert_eq!(s("((a+)+)+"), "a+");
    }

    #[test]
    fn normal_form_is_a_fixpoint() {
        assert_eq!(s("a/b"), "a/b");
    }

    #[test]
    fn closures_in_tests_are_dropped() {
        assert_eq!(s("a+[b+]"), "a+[b]");
        assert_eq!(s("a[b+]"), "a[b]");
        assert_eq!(s("[b+]a+"), "[b]a+");
        assert_eq!(s("[(a/b)+]c"), "[a[b]]c");
    }

    #[test]
    fn main_closures_stay() {
        assert_eq!(s("a+[b]"), "a+[b]");
        assert_eq!(s("[b]a+"), "[b]a+");
    }

    #[test]
    fn concatenated_tests_become_branches() {
        assert_eq!(s("p[a/b/c]"), "p[a[b[c]]]");
        assert_eq!(s("[a/b]p"), "[a[b]]p");
    }

    #[test]
    fn unions_inside_tests_are_left_alone() {
        assert_eq!(s("p[a|b/c]"), "p[a|b/c]");
    }
}
