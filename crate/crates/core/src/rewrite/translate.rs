use std::collections::BTreeSet;

use crate::model::{Conjunct, Junction, LabelAtom, PathExpr, RelationAtom, Var};

/// Supplies `_g1`, `_g2`, ... skipping names the query already uses.
pub struct FreshVars {
    next: usize,
    taken: BTreeSet<Var>,
}

impl FreshVars {
    pub fn new(taken: BTreeSet<Var>) -> Self {
        FreshVars { next: 1, taken }
    }

    pub fn fresh(&mut self) -> Var {
        loop {
            let v = Var::new(format!("_g{}", self.next));
            self.next += 1;
            if self.taken.insert(v.clone()) {
                return v;
            }
        }
    }
}

/// Translates an annotated expression between `alpha` and `beta` into a
/// conjunct. Plain subexpressions stay whole; every annotated junction
/// becomes a fresh variable with a label atom, and branches and
/// conjunctions are split into separate atoms.
pub fn query_of(alpha: &Var, beta: &Var, expr: &PathExpr, fresh: &mut FreshVars) -> Conjunct {
    let mut out = Conjunct::default();
    translate(alpha, beta, expr, fresh, &mut out);
    out
}

fn translate(a: &Var, b: &Var, e: &PathExpr, fresh: &mut FreshVars, out: &mut Conjunct) {
    if e.is_plain() {
        out.relations
            .push(RelationAtom::new(a.clone(), e.clone(), b.clone()));
        return;
    }
    match e {
        PathExpr::Concat(..) | PathExpr::AnnConcat(..) => {
            let (steps, junctions) = e.chain();
            // Cut the chain wherever a junction is annotated or a step
            // needs its own translation.
            let mut groups: Vec<(usize, usize)> = Vec::new();
            let mut start = 0;
            for i in 0..junctions.len() {
                if junctions[i].labels.is_some() || !steps[i].is_plain() || !steps[i + 1].is_plain() {
                    groups.push((start, i + 1));
                    start = i + 1;
                }
            }
            groups.push((start, steps.len()));

            let mut vars = vec![a.clone()];
            for _ in 1..groups.len() {
                vars.push(fresh.fresh());
            }
            vars.push(b.clone());

            for (g, &(lo, hi)) in groups.iter().enumerate() {
                if g > 0 {
                    if let Some(labels) = &junctions[lo - 1].labels {
                        out.labels.push(LabelAtom {
                            var: vars[g].clone(),
                            labels: labels.clone(),
                        });
                    }
                }
                let part = PathExpr::from_chain(
                    steps[lo..hi].iter().map(|s| (*s).clone()).collect(),
                    vec![Junction { labels: None }; hi - lo - 1],
                );
                translate(&vars[g], &vars[g + 1], &part, fresh, out);
            }
        }
        PathExpr::BranchR(main, test) => {
            translate(a, b, main, fresh, out);
            let g = fresh.fresh();
            translate(b, &g, test, fresh, out);
        }
        PathExpr::BranchL(test, main) => {
            let g = fresh.fresh();
            translate(a, &g, test, fresh, out);
            translate(a, b, main, fresh, out);
        }
        PathExpr::Conj(x, y) => {
            translate(a, b, x, fresh, out);
            translate(a, b, y, fresh, out);
        }
        // Annotations never end up under a union or a closure in inferred
        // triples; should one appear, it is safe to forget it.
        _ => out
            .relations
            .push(RelationAtom::new(a.clone(), e.strip_annotations(), b.clone())),
    }
}
