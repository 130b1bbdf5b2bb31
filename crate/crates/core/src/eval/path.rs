use std::collections::{BTreeSet, HashMap};

use crate::model::{EdgeLabel, GraphDb, LabelSet, PathExpr};

/// A binary relation over node indices of a [`GraphDb`].
pub type Pairs = BTreeSet<(usize, usize)>;

#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions {
    /// Compute transitive closures by naive iteration instead of the
    /// semi-naive (delta) scheme.
    pub naive_closure: bool,
}

/// Sizes of the relations materialised during evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Sum of the sizes of every intermediate relation.
    pub total_pairs: usize,
    /// Size of the largest intermediate relation.
    pub largest: usize,
    /// Pairs produced inside transitive-closure fixpoints.
    pub closure_pairs: usize,
}

impl EvalStats {
    fn record(&mut self, r: &Pairs) {
        self.total_pairs += r.len();
        self.largest = self.largest.max(r.len());
    }
}

pub(crate) struct PathEval<'a> {
    db: &'a GraphDb,
    by_label: HashMap<&'a EdgeLabel, Vec<(usize, usize)>>,
    options: EvalOptions,
    pub(crate) stats: EvalStats,
}

fn compose(a: &Pairs, b: &Pairs, junction: impl Fn(usize) -> bool) -> Pairs {
    let mut by_src: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(s, t) in b {
        by_src.entry(s).or_default().push(t);
    }
    let mut out = Pairs::new();
    for &(n, z) in a {
        if !junction(z) {
            continue;
        }
        if let Some(ts) = by_src.get(&z) {
            out.extend(ts.iter().map(|&m| (n, m)));
        }
    }
    out
}

impl<'a> PathEval<'a> {
    pub(crate) fn new(db: &'a GraphDb, options: EvalOptions) -> Self {
        let mut by_label: HashMap<&EdgeLabel, Vec<(usize, usize)>> = HashMap::new();
        for e in db.edges() {
            by_label.entry(&e.label).or_default().push((e.src, e.trg));
        }
        PathEval {
            db,
            by_label,
            options,
            stats: EvalStats::default(),
        }
    }

    fn edges(&self, l: &EdgeLabel) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.by_label.get(l).into_iter().flatten().copied()
    }

    fn in_labels(&self, labels: &LabelSet) -> impl Fn(usize) -> bool + '_ {
        let db = self.db;
        let labels = labels.clone();
        move |z| labels.contains(db.label_of(z))
    }

    pub(crate) fn eval(&mut self, e: &PathExpr) -> Pairs {
        let out = match e {
            PathExpr::Label(l) => self.edges(l).collect(),
            PathExpr::Reverse(l) => self.edges(l).map(|(s, t)| (t, s)).collect(),
            PathExpr::Concat(a, b) => {
                let (ra, rb) = (self.eval(a), self.eval(b));
                compose(&ra, &rb, |_| true)
            }
            PathExpr::AnnConcat(a, labels, b) => {
                let (ra, rb) = (self.eval(a), self.eval(b));
                compose(&ra, &rb, self.in_labels(labels))
            }
            PathExpr::Union(a, b) => {
                let mut ra = self.eval(a);
                ra.extend(self.eval(b));
                ra
            }
            PathExpr::Conj(a, b) => {
                let (ra, rb) = (self.eval(a), self.eval(b));
                ra.intersection(&rb).copied().collect()
            }
            PathExpr::BranchR(main, test) => {
                let (rm, rt) = (self.eval(main), self.eval(test));
                let has_out: BTreeSet<usize> = rt.iter().map(|p| p.0).collect();
                rm.into_iter().filter(|(_, m)| has_out.contains(m)).collect()
            }
            PathExpr::BranchL(test, main) => {
                let (rt, rm) = (self.eval(test), self.eval(main));
                let has_out: BTreeSet<usize> = rt.iter().map(|p| p.0).collect();
                rm.into_iter().filter(|(n, _)| has_out.contains(n)).collect()
            }
            PathExpr::Plus(inner) => {
                let base = self.eval(inner);
                if self.options.naive_closure {
                    self.closure_naive(base)
                } else {
                    self.closure_semi_naive(base)
                }
            }
            PathExpr::Repeat(..) => return self.eval(&e.desugar()),
        };
        self.stats.record(&out);
        out
    }

    fn closure_semi_naive(&mut self, base: Pairs) -> Pairs {
        let mut result = base.clone();
        let mut delta = base.clone();
        while !delta.is_empty() {
            let step = compose(&delta, &base, |_| true);
            self.stats.closure_pairs += step.len();
            delta = step.difference(&result).copied().collect();
            result.extend(delta.iter().copied());
        }
        result
    }

    fn closure_naive(&mut self, base: Pairs) -> Pairs {
        let mut result = base.clone();
        loop {
            let step = compose(&result, &base, |_| true);
            self.stats.closure_pairs += step.len();
            let before = result.len();
            result.extend(step);
            if result.len() == before {
                return result;
            }
        }
    }
}

/// All pairs of node indices connected by `expr` in `db`.
pub fn eval_path(expr: &PathExpr, db: &GraphDb) -> Pairs {
    eval_path_with(expr, db, EvalOptions::default()).0
}

pub fn eval_path_with(expr: &PathExpr, db: &GraphDb, options: EvalOptions) -> (Pairs, EvalStats) {
    let mut ev = PathEval::new(db, options);
    let pairs = ev.eval(expr);
    (pairs, ev.stats)
}

/// Maps index pairs back to node identifiers.
pub fn pair_ids(db: &GraphDb, pairs: &Pairs) -> BTreeSet<(String, String)> {
    pairs
        .iter()
        .map(|&(s, t)| (db.node_id(s).to_string(), db.node_id(t).to_string()))
        .collect()
}
