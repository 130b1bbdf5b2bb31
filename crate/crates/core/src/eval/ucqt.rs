use std::collections::{BTreeSet, HashMap};

use super::path::{EvalOptions, EvalStats, Pairs, PathEval};
use crate::model::{Conjunct, GraphDb, LabelSet, Ucqt, Var};

/// Answers to a query: one tuple of node indices per match, in head order.
pub type Tuples = BTreeSet<Vec<usize>>;

struct Atom {
    src: usize,
    trg: usize,
    pairs: Pairs,
    by_src: HashMap<usize, Vec<usize>>,
    by_trg: HashMap<usize, Vec<usize>>,
}

struct Search<'a> {
    db: &'a GraphDb,
    atoms: Vec<Atom>,
    order: Vec<usize>,
    constraints: Vec<Option<LabelSet>>,
    free: Vec<usize>,
    head: Vec<usize>,
    binding: Vec<Option<usize>>,
    out: Tuples,
}

impl Search<'_> {
    fn allowed(&self, var: usize, node: usize) -> bool {
        match &self.constraints[var] {
            Some(labels) => labels.contains(self.db.label_of(node)),
            None => true,
        }
    }

    fn bind(&mut self, var: usize, node: usize, depth: usize) {
        match self.binding[var] {
            Some(n) if n == node => self.step(depth + 1),
            Some(_) => {}
            None => {
                if self.allowed(var, node) {
                    self.binding[var] = Some(node);
                    self.step(depth + 1);
                    self.binding[var] = None;
                }
            }
        }
    }

    fn step(&mut self, depth: usize) {
        if depth < self.order.len() {
            let atom = &self.atoms[self.order[depth]];
            let (s, t) = (atom.src, atom.trg);
            let candidates: Vec<(usize, usize)> = match (self.binding[s], self.binding[t]) {
                (Some(a), Some(b)) => {
                    if atom.pairs.contains(&(a, b)) {
                        vec![(a, b)]
                    } else {
                        vec![]
                    }
                }
                (Some(a), None) => atom
                    .by_src
                    .get(&a)
                    .into_iter()
                    .flatten()
                    .map(|&b| (a, b))
                    .collect(),
                (None, Some(b)) => atom
                    .by_trg
                    .get(&b)
                    .into_iter()
                    .flatten()
                    .map(|&a| (a, b))
                    .collect(),
                (None, None) => atom.pairs.iter().copied().collect(),
            };
            for (a, b) in candidates {
                if s == t && a != b {
                    continue;
                }
                let was_bound = self.binding[s].is_some();
                if !was_bound {
                    if !self.allowed(s, a) {
                        continue;
                    }
                    self.binding[s] = Some(a);
                }
                // `bind` advances the depth once the target is settled.
                self.bind(t, b, depth);
                if !was_bound {
                    self.binding[s] = None;
                }
            }
            return;
        }
        let free_depth = depth - self.order.len();
        if free_depth < self.free.len() {
            let var = self.free[free_depth];
            for node in 0..self.db.len() {
                self.bind(var, node, depth);
            }
            return;
        }
        let tuple = self
            .head
            .iter()
            .map(|&v| self.binding[v].expect("head variables are bound"))
            .collect();
        self.out.insert(tuple);
    }
}

/// Greedy atom order: repeatedly pick the atom with the most endpoints
/// already bound, breaking ties by the smaller relation.
fn plan(atoms: &[Atom], nvars: usize) -> Vec<usize> {
    let mut bound = vec![false; nvars];
    let mut left: Vec<usize> = (0..atoms.len()).collect();
    let mut order = Vec::new();
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by_key(|(_, &i)| {
                let a = &atoms[i];
                let nbound = bound[a.src] as usize + bound[a.trg] as usize;
                (std::cmp::Reverse(nbound), a.pairs.len(), i)
            })
            .expect("non-empty");
        let i = left.remove(pos);
        bound[atoms[i].src] = true;
        bound[atoms[i].trg] = true;
        order.push(i);
    }
    order
}

fn eval_conjunct(conj: &Conjunct, head: &[Var], db: &GraphDb, ev: &mut PathEval) -> Tuples {
    let Some(conj) = conj.merge_label_atoms() else {
        return Tuples::new();
    };
    let mut vars: Vec<Var> = head.to_vec();
    for v in conj.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let ix = |v: &Var| vars.iter().position(|x| x == v).expect("variable is known");

    let mut atoms = Vec::new();
    for r in &conj.relations {
        let pairs = ev.eval(&r.expr);
        let mut by_src: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut by_trg: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b) in &pairs {
            by_src.entry(a).or_default().push(b);
            by_trg.entry(b).or_default().push(a);
        }
        atoms.push(Atom {
            src: ix(&r.src),
            trg: ix(&r.trg),
            pairs,
            by_src,
            by_trg,
        });
    }

    let mut constraints = vec![None; vars.len()];
    for l in &conj.labels {
        constraints[ix(&l.var)] = Some(l.labels.clone());
    }
    let in_atoms: BTreeSet<usize> = atoms.iter().flat_map(|a| [a.src, a.trg]).collect();
    let free = (0..vars.len()).filter(|v| !in_atoms.contains(v)).collect();

    let mut search = Search {
        db,
        order: plan(&atoms, vars.len()),
        atoms,
        constraints,
        free,
        head: (0..head.len()).collect(),
        binding: vec![None; vars.len()],
        out: Tuples::new(),
    };
    search.step(0);
    search.out
}

/// Evaluates a query under set semantics: every assignment of variables to
/// nodes satisfying all atoms of some disjunct, projected onto the head.
pub fn eval_ucqt(query: &Ucqt, db: &GraphDb) -> Tuples {
    eval_ucqt_with(query, db, EvalOptions::default()).0
}

pub fn eval_ucqt_with(query: &Ucqt, db: &GraphDb, options: EvalOptions) -> (Tuples, EvalStats) {
    let mut ev = PathEval::new(db, options);
    let mut out = Tuples::new();
    for d in query.disjuncts() {
        out.extend(eval_conjunct(d, query.head(), db, &mut ev));
    }
    (out, ev.stats)
}

/// Maps answer tuples to node identifiers.
pub fn tuple_ids(db: &GraphDb, tuples: &Tuples) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = tuples
        .iter()
        .map(|t| t.iter().map(|&n| db.node_id(n).to_string()).collect())
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::yago_db;
    use crate::syntax::parse_ucqt;

    fn run(text: &str) -> Vec<Vec<String>> {
        let db = yago_db();
        tuple_ids(&db, &eval_ucqt(&parse_ucqt(text).unwrap(), &db))
    }

    #[test]
    fn single_owns_edge() {
        assert_eq!(run("x,y <- (x, owns, y)"), [["n2", "n1"]]);
    }

    #[test]
    fn owners_living_somewhere_located() {
        // n2 owns n1 and lives in n4, which is located in n5 and n7; n3
        // owns nothing.
        assert_eq!(run("y <- (y, livesIn/isLocatedIn+, m) && (y, owns, z)"), [["n2"]]);
    }

    #[test]
    fn empty_union_has_no_answers() {
        assert!(run("x <- false").is_empty());
    }

    #[test]
    fn label_atoms_filter_and_enumerate() {
        assert_eq!(run("x <- x:{CITY}"), [["n4"], ["n6"]]);
        assert_eq!(
            run("x,y <- (x, isLocatedIn+, y) && y:{COUNTRY} && x:{CITY}"),
            [["n4", "n7"], ["n6", "n7"]]
        );
    }

    #[test]
    fn repeated_variable_means_cycle() {
        assert_eq!(run("x <- (x, isMarriedTo/isMarriedTo, x)"), [["n2"], ["n3"]]);
        assert!(run("x <- (x, isMarriedTo, x)").is_empty());
    }

    #[test]
    fn disjuncts_union() {
        assert_eq!(
            run("x,y <- (x, owns, y) || (x, livesIn, y) && y:{CITY}"),
            [["n2", "n1"], ["n2", "n4"], ["n3", "n4"]]
        );
    }
}
